#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/catalog.hpp"
#include "meas/covering.hpp"
#include "meas/instances.hpp"

#include <map>

using namespace meas;

namespace {

BasisKey K(const char* s) { return parse_key(s); }
Element E(const char* s) { return parse_element(s); }

Scalar fact(int n) {
    Scalar r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// z_lambda = prod_i i^{m_i} m_i!
Scalar z_lambda(const std::vector<int>& parts) {
    std::map<int, int> mult;
    for (int p : parts) ++mult[p];
    Scalar z = 1;
    for (const auto& [i, m] : mult) {
        for (int j = 0; j < m; ++j) z *= i;
        z *= fact(m);
    }
    return z;
}

void partitions(int n, int max, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(n, max); k >= 1; --k) {
        cur.push_back(k);
        partitions(n - k, k, cur, out);
        cur.pop_back();
    }
}

// h_n = sum over partitions of n of p_lambda / z_lambda.
Element complete_h(int n) {
    std::vector<std::vector<int>> ps;
    std::vector<int> cur;
    partitions(n, n, cur, ps);
    Element h;
    for (const auto& p : ps) h.add(BasisKey::partition(p), 1 / z_lambda(p));
    return h;
}

// NSym -> Sym, H_a -> h_{a_1} ... h_{a_r}.
LinMap abelianization(int N) {
    Bialg sym = build_sym();
    Coalg nsym = build_nsym();
    return tabulate("ab", nsym, sym, N, [sym](const BasisKey& k) {
        Element r = sym->unit;
        for (int a : k.parts()) r = sym->multiply(r, complete_h(a));
        return r;
    });
}

PartialCovering ex14() { return covering_by_name("nsym-to-sym"); }

}  // namespace

TEST_CASE("identity covering") {
    auto f = identity_covering(build_sym());
    CHECK(f.value(K("p[2]"), BasisKey::point("pt")) == E("p[2]"));
    auto r = verify_covering(f, 5);
    CHECK(r.ok());
    for (const auto& d : r.ranks) CHECK(d.achieved == d.dimension);
}

TEST_CASE("morphism families") {
    Bialg sym = build_sym();
    auto one = from_morphism_family(sym, sym, {identity_map(sym, 4)}, 4);
    CHECK(verify_covering(one, 4).ok());
    CHECK(one.value(K("p[2,1]"), BasisKey::point("xi1")) == E("p[2,1]"));

    auto two = from_morphism_family(sym, sym, {identity_map(sym, 4), identity_map(sym, 4)}, 4);
    CHECK(verify_covering(two, 4).ok());
    auto nd = nondegeneracy_report(two, 4);
    CHECK_FALSE(nd.nondegenerate);
    REQUIRE(nd.kernel.size() == 1);
    Element k = nd.kernel[0];
    CHECK(k.coeff(BasisKey::point("xi1")) == -k.coeff(BasisKey::point("xi2")));
    CHECK(k.terms().size() == 2);

    auto ab = from_morphism_family(build_nsym(), sym, {abelianization(4)}, 4);
    auto r = verify_covering(ab, 4);
    CHECK(r.measuring_ok);
    CHECK(r.coalgebra_map_ok);
    CHECK(r.surjective_ok);
}

TEST_CASE("morphism families reject non-bialgebra maps") {
    Bialg sym = build_sym();
    auto doubled = tabulate("double", sym, sym, 3, [sym](const BasisKey& k) {
        return Scalar(1 << sym->degree(k)) * Element(k);
    });
    CHECK_NOTHROW(from_morphism_family(sym, sym, {doubled}, 3));
    auto bad = tabulate("twice", sym, sym, 3, [](const BasisKey& k) { return 2 * Element(k); });
    CHECK_THROWS_WITH_AS(from_morphism_family(sym, sym, {bad}, 3),
                         doctest::Contains("map 1 (twice) is not a bialgebra map: unit"), std::invalid_argument);
    CHECK_THROWS_AS(from_morphism_family(sym, sym, {}, 3), std::invalid_argument);
}

TEST_CASE("compose with identities and associativity") {
    auto f = ex14();
    auto id_a = identity_covering(f.A), id_b = identity_covering(f.B);
    auto left = compose(id_a, f), right = compose(f, id_b);
    auto pt = BasisKey::point("pt");
    for (const auto& b : f.B->keys_upto(4))
        for (const auto& c : f.C->keys_upto(4)) {
            CHECK(left.value(b, BasisKey::tensor(c, pt)) == f.value(b, c));
            CHECK(right.value(b, BasisKey::tensor(pt, c)) == f.value(b, c));
        }

    RegistryParams p;
    p.m = 3;
    auto k = covering_by_name("omp-to-nsym-scaled", p);
    auto h = f;
    auto g = covering_by_name("identity-sym");
    // (g h) k versus g (h k) on flattened keys.
    auto gh_f = compose(compose(g, h), k);
    auto g_hf = compose(g, compose(h, k));
    for (const auto& b : k.B->keys_upto(3))
        for (const auto& x : k.C->keys_upto(3))
            for (const auto& y : h.C->keys_upto(3)) {
                Element l = gh_f.value(b, BasisKey::tensor(x, BasisKey::tensor(y, pt)));
                Element r = g_hf.value(b, BasisKey::tensor(BasisKey::tensor(x, y), pt));
                CHECK(l == r);
            }
    CHECK_THROWS_AS(compose(f, f), std::invalid_argument);
}

TEST_CASE("composite of OMP and NSym coverings") {
    RegistryParams p;
    p.m = 3;
    auto h = compose(ex14(), covering_by_name("omp-to-nsym-scaled", p));
    auto r = verify_covering(h, 3);
    CHECK(r.measuring_ok);
    CHECK(r.coalgebra_map_ok);
    CHECK(r.surjective_ok);
}

TEST_CASE("direct sums") {
    auto f = ex14();
    auto ff = direct_sum(f, f);
    CHECK(ff.C->keys_upto(3).size() == 2 * f.C->keys_upto(3).size());
    auto rf = image_ranks(f, 4), rff = image_ranks(ff, 4);
    REQUIRE(rf.size() == rff.size());
    for (std::size_t i = 0; i < rf.size(); ++i) CHECK(rf[i].achieved == rff[i].achieved);

    PartialCovering poor;
    poor.name = "top-only";
    poor.B = f.B;
    poor.A = f.A;
    poor.C = f.C;
    poor.mode = CoveringMode::Table;
    poor.rule = [](const BasisKey& b, const BasisKey& c) {
        bool top = b.parts().size() == 1 && c.parts().size() == 1 && b.parts()[0] == c.parts()[0];
        return top || (b.parts().empty() && c.parts().empty()) ? Element(c) : Element();
    };
    CHECK_FALSE(verify_covering(poor, 3).surjective_ok);
    CHECK(verify_covering(direct_sum(f, poor), 3).surjective_ok);
    CHECK(verify_covering(direct_sum(poor, f), 3).surjective_ok);

    for (const auto& c : f.C->keys_upto(3)) {
        CHECK(ff.C->counit(BasisKey::summand(1, c)) == f.C->counit(c));
        CHECK(ff.C->counit(BasisKey::summand(2, c)) == f.C->counit(c));
    }
    CHECK_THROWS_AS(direct_sum(f, identity_covering(build_sym())), std::invalid_argument);
}

TEST_CASE("two-point 2-cells") {
    auto ex = two_point_example(build_sym());
    CHECK(verify_morphism(ex.t, 4).ok());
    CHECK(verify_morphism(identity_morphism(ex.f), 4).ok());

    auto bad = ex.t;
    bad.t.f = [](const BasisKey& k) {
        return k.name() == "x" ? Element(BasisKey::point("z")) : 2 * Element(BasisKey::point("z"));
    };
    auto r = verify_morphism(bad, 4);
    CHECK_FALSE(r.coalgebra_map_ok);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].inputs[0] == BasisKey::point("y"));
}

TEST_CASE("pushout of the two-point cell along the identity") {
    auto ex = two_point_example(build_sym());
    auto p = pushout(ex.t, identity_morphism(ex.f), 4);
    CHECK(p.representatives.size() == 1);
    CHECK(p.relation_rank == 2);
    CHECK(p.propagates_surjectivity);
    CHECK(verify_morphism(p.from_g, 4).ok());
    CHECK(verify_morphism(p.from_h, 4).ok());
    CHECK(verify_covering(p.k, 4).ok());
    // Both points and z land on the single class.
    auto q = p.from_g.t(BasisKey::point("z"));
    CHECK(p.from_h.t(BasisKey::point("x")) == q);
    CHECK(p.from_h.t(BasisKey::point("y")) == q);

    auto u = identity_morphism(ex.g);
    auto v = ex.t;
    auto uni = pushout_universal(p, u, v, 4);
    CHECK(uni.exists);
    CHECK(uni.unique);
    REQUIRE(uni.map);
    CHECK((*uni.map)(q.terms().begin()->first) == Element(BasisKey::point("z")));
}

TEST_CASE("pushout of identities is the original covering") {
    auto f = ex14();
    auto p = pushout(identity_morphism(f), identity_morphism(f), 3);
    CHECK(p.representatives.size() == f.C->keys_upto(3).size());
    for (const auto& b : f.B->keys_upto(3))
        for (const auto& c : f.C->keys_upto(3)) CHECK(p.k.apply(Element(b), p.from_g.t(c)) == f.value(b, c));
}

TEST_CASE("pushout universal property fails without a compatible cocone") {
    auto ex = two_point_example(build_sym());
    auto p = pushout(ex.t, identity_morphism(ex.f), 2);
    // u sends z to z and v sends x, y to y: the cocone does not commute on x.
    auto two = ex.f;
    auto u = CoveringMorphism{ex.g, two, CoalgebraMap{"u", ex.g.C, two.C, [](const BasisKey&) {
                                                          return Element(BasisKey::point("x"));
                                                      }}};
    auto v = CoveringMorphism{ex.f, two, CoalgebraMap{"v", ex.f.C, two.C, [](const BasisKey&) {
                                                          return Element(BasisKey::point("y"));
                                                      }}};
    CHECK_FALSE(pushout_universal(p, u, v, 2).exists);
}

TEST_CASE("equivalence without isomorphism") {
    auto ex = two_point_example(build_sym());
    auto e = equivalent_via(ex.f, ex.g, ex.g, ex.t, identity_morphism(ex.g), 4);
    CHECK(e.equivalent);
    CHECK(e.ranges_coincide);
    auto s = search_invertible_2cells(ex.f, ex.g, 4);
    CHECK(s.forward_maps == 1);
    CHECK(s.backward_maps == 2);
    CHECK(s.forward_2cells == 1);
    CHECK(s.backward_2cells == 2);
    CHECK_FALSE(s.inverse_pair);

    auto self = search_invertible_2cells(ex.f, ex.f, 4);
    CHECK(self.forward_maps == 4);
    CHECK(self.inverse_pair);

    auto f = ex14();
    CHECK(equivalent_via(f, f, f, identity_morphism(f), identity_morphism(f), 3).equivalent);
    CHECK_THROWS_AS(search_invertible_2cells(f, f, 2), std::invalid_argument);
}

TEST_CASE("equivalence fails for a non-surjective cell") {
    auto ex = two_point_example(build_sym());
    auto inc = CoveringMorphism{ex.g, ex.f, CoalgebraMap{"x", ex.g.C, ex.f.C, [](const BasisKey&) {
                                                             return Element(BasisKey::point("x"));
                                                         }}};
    auto e = equivalent_via(ex.g, ex.g, ex.f, inc, inc, 2);
    CHECK(e.s_ok);
    CHECK_FALSE(e.s_surjective);
    CHECK_FALSE(e.equivalent);
}

TEST_CASE("local finitization of the identity covering") {
    auto f = locally_finitize(identity_covering(build_sym()));
    auto pt = BasisKey::point("pt");
    auto H = [](int n) { return BasisKey::power('H', n); };
    CHECK(f.value(K("p[2]"), BasisKey::tensor(pt, H(2))) == E("p[2]"));
    CHECK(f.value(K("p[2]"), BasisKey::tensor(pt, H(1))).is_zero());
    CHECK(f.value(BasisKey::partition({}), BasisKey::tensor(pt, H(0))) == f.A->unit);
    for (const auto& b : f.B->keys_upto(4)) {
        Element s;
        for (int n = 0; n <= 4; ++n) s += f.value(b, BasisKey::tensor(pt, H(n)));
        CHECK(s == Element(b));
    }
    CHECK(verify_covering(f, 4).ok());
    auto g = grading_report(f, 4);
    CHECK(g.locally_finite == GradingStatus::Certified);
    CHECK(g.bigraded == GradingStatus::TrueUpToN);
    CHECK_THROWS_AS(locally_finitize(covering_by_name("laurent-to-group")), std::invalid_argument);
}

TEST_CASE("local finitization keeps verdicts and ranks") {
    for (const char* name : {"nsym-to-sym", "poly-to-qsym"}) {
        CAPTURE(name);
        auto f = covering_by_name(name);
        auto g = locally_finitize(f);
        auto rf = verify_covering(f, 3), rg = verify_covering(g, 3);
        CHECK(rf.measuring_ok == rg.measuring_ok);
        CHECK(rf.coalgebra_map_ok == rg.coalgebra_map_ok);
        CHECK(rf.surjective_ok == rg.surjective_ok);
        auto a = image_ranks(f, 3), b = image_ranks(g, 3);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].achieved == b[i].achieved);
    }
}

TEST_CASE("canonical NSym covering") {
    auto can = canonical_nsym_covering(build_sym());
    CHECK(can.apply(E("H[2]"), E("p[2] + p[1]")) == E("p[2]"));
    CHECK(can.value(K("H[1,1]"), K("p[1,1]")) == E("2*p[1,1]"));
    auto r = verify_covering(can, 4);
    CHECK(r.ok());
    CHECK_THROWS_WITH_AS(canonical_nsym_covering(build_qsym()), doctest::Contains("coalgebra map fails"),
                         std::invalid_argument);
    CHECK_THROWS_AS(canonical_nsym_covering(build_group_algebra(cyclic_group(2))), std::invalid_argument);
}

TEST_CASE("factorization through the canonical covering") {
    auto f = ex14();
    auto r = factor_through_can(f, 4);
    CHECK(r.ok);
    REQUIRE(r.fbar);
    for (const auto& c : f.C->keys_upto(4)) CHECK((*r.fbar)(c) == Element(c));

    PartialCovering wild;
    wild.name = "wild";
    wild.B = f.B;
    wild.A = f.A;
    wild.C = f.C;
    wild.mode = CoveringMode::Table;
    wild.rule = [](const BasisKey& b, const BasisKey& c) {
        return c.parts().empty() && b.parts().size() == 1 ? Element(BasisKey::partition({b.parts()[0]}))
                                                          : Element();
    };
    auto w = factor_through_can(wild, 2);
    CHECK_FALSE(w.ok);
    REQUIRE(w.divergent);
    CHECK(*w.divergent == BasisKey::partition({}));
    CHECK_THROWS_AS(factor_through_can(covering_by_name("poly-to-sym"), 2), std::invalid_argument);
}

TEST_CASE("non-degeneracy") {
    CHECK(nondegeneracy_report(ex14(), 5).nondegenerate);
    CHECK(nondegeneracy_report(identity_covering(build_sym()), 3).nondegenerate);
}
