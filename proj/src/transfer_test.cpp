#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/catalog.hpp"
#include "meas/transfer.hpp"

using namespace meas;

namespace {

BasisKey K(const char* s) { return parse_key(s); }
Element E(const char* s) { return parse_element(s); }

Element apply_pairs(const PartialCovering& f, const Element& x) {
    Element out;
    for (const auto& [k, c] : x.terms()) out += c * f.value(k.left(), k.right());
    return out;
}

// f(z^n, p_lambda) = n^l(lambda) p_lambda, a covering Laurent -> Sym with non-grouplike images.
PartialCovering power_covering() {
    PartialCovering f;
    f.name = "laurent-power-sym";
    f.B = build_laurent_point(3);
    f.A = build_sym();
    f.C = f.A;
    f.mode = CoveringMode::Table;
    f.rule = [](const BasisKey& b, const BasisKey& c) {
        Scalar s = 1;
        for (std::size_t i = 0; i < c.parts().size(); ++i) s *= b.exponent();
        return Element(c, s);
    };
    return f;
}

}  // namespace

TEST_CASE("sections invert the covering") {
    auto f = covering_by_name("can-sym");
    auto a = linear_section(f, 4);
    auto b = linear_section(f, 4, SectionOrder::Reversed);
    CHECK(a.verified_degree == 4);
    for (const auto& k : f.A->keys_upto(4)) {
        CHECK(apply_pairs(f, a(k)) == Element(k));
        CHECK(apply_pairs(f, b(k)) == Element(k));
    }
    CHECK(a(K("p[2,1]")) != b(K("p[2,1]")));
    CHECK_THROWS_AS(a(K("p[5]")), std::out_of_range);
}

TEST_CASE("identity section") {
    auto f = identity_covering(build_nsym());
    auto s = linear_section(f, 3);
    CHECK(s(K("H[1,2]")) == Element(BasisKey::tensor(K("H[1,2]"), BasisKey::point("pt"))));
}

TEST_CASE("sections fail on non-surjective coverings") {
    CHECK_THROWS_WITH_AS(linear_section(covering_by_name("poly-to-qsym"), 4),
                         "poly-to-qsym is not surjective at degree 3: M[1,2] has no preimage", std::invalid_argument);
}

TEST_CASE("transferred primitives") {
    auto f = covering_by_name("can-sym");
    CHECK(transfer_primitive(f, E("H[1]"), K("p[1]")) == E("p[1]"));
    CHECK_THROWS_WITH_AS(transfer_primitive(f, E("H[2]"), K("p[2]")), "H[2] is not primitive in NSym",
                         std::invalid_argument);
    auto g = build_omp_covering({4}, true);
    CHECK(transfer_primitive(g, E("w[{3}]"), K("H[1]")) == E("H[1]"));
    CHECK(is_primitive(*build_sym(), E("p[3]")));
    CHECK_FALSE(is_primitive(*build_sym(), E("p[1,1]")));

    auto r = primitive_containment(covering_by_name("nsym-to-sym"), 4);
    CHECK(r.ok);
    REQUIRE(r.ranks.size() == 4);
    for (const auto& [moved, dim] : r.ranks) CHECK(moved == dim);
}

TEST_CASE("transferred antipode") {
    auto f = covering_by_name("can-sym");
    auto r = transfer_antipode(f, linear_section(f, 4), 4);
    CHECK(r.matches_oracle);
    CHECK(r.oracle == "takeuchi");
    CHECK(r.antipode(K("p[1]")) == E("-1*p[1]"));
    CHECK(r.antipode(K("p[2,1]")) == E("p[2,1]"));

    auto g = covering_by_name("laurent-to-group");
    auto rg = transfer_antipode(g, linear_section(g, 4, SectionOrder::Reversed), 4);
    CHECK(rg.matches_oracle);
    CHECK(rg.oracle == "convolution-inverse solve");

    RegistryParams p;
    p.m = 3;
    auto o = covering_by_name("identity-omp", p);
    auto ro = transfer_antipode(o, linear_section(o, 4), 4);
    CHECK(ro.matches_oracle);
    CHECK(ro.oracle == "takeuchi on generators");
    CHECK(ro.antipode(K("w[{1}]")) == E("-1*w[{1}]"));

    auto q = covering_by_name("poly-to-qsym");
    CHECK_THROWS_AS(transfer_antipode(q, LinearSection{}, 2), AntipodeUnavailable);
    CHECK_THROWS_AS(transfer_antipode(f, linear_section(f, 2), 3), std::invalid_argument);
}

TEST_CASE("swap identity") {
    auto f = covering_by_name("nsym-to-sym");
    auto r = swap_identity_check(f, 3);
    CHECK(r.ok);
    CHECK(r.triples == r.symmetric);
    auto m = swap_identity_check(covering_by_name("monoid-dual-cover"), 3);
    CHECK_FALSE(m.ok);
    REQUIRE(m.witness);
    CHECK(m.witness->inputs == std::vector<BasisKey>{K("z^1"), K("z^1"), K("x[a]")});
    CHECK(m.witness->lhs != m.witness->rhs);
    auto q = swap_identity_check(covering_by_name("poly-to-qsym"), 3);
    CHECK(q.symmetric < q.triples);
}

TEST_CASE("cocommutative image") {
    auto r = image_cocommutativity_check(covering_by_name("nsym-to-sym"), 3);
    CHECK(r.b_hopf);
    CHECK(r.checked > 0);
    CHECK(r.ok());
    auto m = image_cocommutativity_check(covering_by_name("monoid-dual-cover"), 3);
    CHECK_FALSE(m.b_hopf);
    CHECK(m.ok());
    REQUIRE_FALSE(m.violations.empty());
    CHECK(m.violations[0].inputs == std::vector<BasisKey>{K("z^1"), K("x[a]")});
    CHECK(m.violations[0].lhs == E("x[a]"));
}

TEST_CASE("transported characters") {
    auto f = covering_by_name("identity-z2-group");
    auto eps = character_transport(f, [&](const BasisKey& a) { return f.A->counit(a); }, 1);
    CHECK(eps.multiplicative);
    auto sign = character_transport(f, [](const BasisKey& a) { return Scalar(a == K("g[e]") ? 1 : -1); }, 1);
    CHECK(sign.multiplicative);
    auto sq = convolve_characters(f, sign.table, sign.table);
    CHECK(sq == eps.table);
    CHECK(convolve_characters(f, sign.table, eps.table) == sign.table);

    CHECK_THROWS_AS(character_transport(f, [](const BasisKey&) { return Scalar(2); }, 1), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        character_transport(f, [](const BasisKey& a) { return Scalar(a == K("g[e]") ? 1 : 2); }, 1),
        "character is not multiplicative at (g[r1], g[r1]): 1 != 4", std::invalid_argument);

    auto g = covering_by_name("nsym-to-sym");
    auto t = character_transport(g, [&](const BasisKey& a) { return g.A->counit(a); }, 3);
    CHECK(t.multiplicative);
}

TEST_CASE("Galois maps") {
    auto z2 = galois_check(bialgebra_by_name("z2-group"));
    CHECK(z2.dimension == 2);
    CHECK(z2.beta_rank == 4);
    CHECK(z2.bijective);
    CHECK(z2.hopf);
    CHECK(z2.consistent);
    CHECK(z2.gamma_surjective);
    for (const char* n : {"monoid-dual", "monoid-algebra"}) {
        CAPTURE(n);
        auto r = galois_check(bialgebra_by_name(n));
        CHECK(r.beta_rank < 9);
        CHECK_FALSE(r.bijective);
        CHECK_FALSE(r.hopf);
        CHECK(r.consistent);
        CHECK_FALSE(r.gamma_surjective);
    }
    CHECK_THROWS_AS(galois_check(build_sym()), std::invalid_argument);
}

TEST_CASE("gamma maps") {
    auto r = gamma_surjectivity(covering_by_name("identity-z2-group"), 0);
    CHECK(r.triples == 4);
    CHECK(r.ok());
    auto l = gamma_surjectivity(covering_by_name("laurent-to-group"), 2);
    CHECK(l.ok());
    CHECK_THROWS_AS(gamma_surjectivity(covering_by_name("monoid-dual-cover"), 1), AntipodeUnavailable);
    CHECK_THROWS_AS(gamma_surjectivity(covering_by_name("nsym-to-sym"), 1), std::invalid_argument);
}

TEST_CASE("point convolution inverses") {
    auto f = covering_by_name("laurent-to-group");
    auto r = point_convolution_inverse(f, K("z^1"), 2);
    CHECK(r.z_inverse == K("z^-1"));
    CHECK(r.inverse_ok);
    CHECK(r.coalgebra_maps);
    auto s = antipode(f.A, 0);
    for (const auto& [c, v] : r.phi.table) {
        CHECK(v == Element(c));
        CHECK(r.phibar(c) == s(c));
    }
    auto m = covering_by_name("monoid-dual-cover");
    CHECK_THROWS_WITH_AS(point_convolution_inverse(m, K("z^1"), 3), "z^1 has no inverse key in k[z]",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(point_convolution_inverse(covering_by_name("nsym-to-sym"), K("H[1]"), 2),
                         "H[1] is not grouplike in NSym", std::invalid_argument);
}

TEST_CASE("point invertibility on a matrix coalgebra") {
    auto c = build_matrix_coalgebra(2);
    auto a = bialgebra_by_name("z2-group");
    auto g = Element(K("g[r1]"));
    // Upper triangular: phi(e11) = phi(e22) = g, phi(e12) = g - 1.
    auto phi = tabulate("phi", c, a, 0, [&](const BasisKey& k) {
        if (k.row() == k.col()) return g;
        if (k.row() == 1) return g - a->unit;
        return Element();
    });
    auto phibar = tabulate("phibar", c, a, 0, [&](const BasisKey& k) {
        if (k.row() == k.col()) return g;
        if (k.row() == 1) return a->unit - g;
        return Element();
    });
    auto r = point_invertibility_check(phi, phibar);
    CHECK(r.ok);
    CHECK(r.upper_triangular);

    // Off-diagonal permutation: mutually inverse, but phi(e11) = 0.
    auto swap = tabulate("swap", c, a, 0, [&](const BasisKey& k) { return k.row() == k.col() ? Element() : a->unit; });
    auto bad = point_invertibility_check(swap, swap);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.upper_triangular);
    REQUIRE(bad.witnesses.size() == 2);
    CHECK(bad.witnesses[0].inputs == std::vector<BasisKey>{BasisKey::cell(1, 1)});

    CHECK_THROWS_AS(point_invertibility_check(phi, phi), std::invalid_argument);
}

TEST_CASE("conclusion for pointed coverings") {
    auto h = pointed_cover_conclusion_check(covering_by_name("nsym-to-sym"), 3);
    CHECK(h.hypotheses);
    CHECK(h.antipode_found);
    auto m = pointed_cover_conclusion_check(covering_by_name("monoid-dual-cover"), 2);
    CHECK_FALSE(m.hypotheses);
    CHECK_FALSE(m.antipode_found);
    CHECK(m.note == "hypotheses not satisfied; (kM)* indeed not Hopf");
    auto q = pointed_cover_conclusion_check(covering_by_name("poly-to-qsym"), 2);
    CHECK(q.antipode_found);
}

TEST_CASE("grouplike images") {
    CHECK_FALSE(grouplike_image_witness(covering_by_name("laurent-to-group"), 2));
    auto w = grouplike_image_witness(power_covering(), 1);
    REQUIRE(w);
    CHECK(w->inputs == std::vector<BasisKey>{K("z^-3"), K("p[1]")});
    CHECK(w->lhs == E("-3*p[1]"));
}
