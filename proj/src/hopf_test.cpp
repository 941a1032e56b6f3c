#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/instances.hpp"

using namespace meas;

namespace {

BasisKey K(const char* s) { return parse_key(s); }
Element E(const char* s) { return parse_element(s); }

// Rank of a list of elements, by exact elimination over their joint support.
std::size_t span_rank(const std::vector<Element>& xs) {
    std::map<BasisKey, std::size_t> col;
    for (const auto& x : xs)
        for (const auto& [k, c] : x.terms()) col.emplace(k, col.size());
    DenseMatrix m(xs.size(), col.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (const auto& [k, c] : xs[i].terms()) m.at(i, col.at(k)) = c;
    return rank(m);
}

}  // namespace

TEST_CASE("convolution basics") {
    auto sym = build_sym();
    auto id = identity_map(sym, 4);
    auto ue = unit_counit(sym, sym, 4);
    auto f = convolution(id, ue);
    for (const auto& k : sym->keys_upto(4)) CHECK(f(k) == id(k));
    CHECK(convolution(id, id)(K("p[1]")) == E("2*p[1]"));

    auto g = build_group_algebra(symmetric_group_s3());
    auto gid = identity_map(g, 0);
    CHECK(convolution(gid, gid)(K("g[r1]")) == E("g[r2]"));

    auto nsym = build_nsym();
    CHECK_THROWS_AS(convolution(id, identity_map(nsym, 4)), std::invalid_argument);
}

TEST_CASE("convolution powers") {
    auto g = build_group_algebra(symmetric_group_s3());
    CHECK(convolution_power(g, 0, 0)(K("g[s1]")) == E("g[e]"));
    CHECK(convolution_power(g, 2, 0)(K("g[r1]")) == E("g[r2]"));
    CHECK(convolution_power(g, -1, 0)(K("g[r1]")) == E("g[r2]"));
    CHECK(convolution_power(g, -2, 0)(K("g[r1]")) == E("g[r1]"));
    CHECK(convolution_power(g, 3, 0)(K("g[s2]")) == E("g[s2]"));
    auto sym = build_sym();
    CHECK(convolution_power(sym, 0, 3)(K("p[2,1]")).is_zero());
    CHECK(convolution_power(sym, 0, 3)(K("p[]")) == E("p[]"));
    CHECK(convolution_power(sym, 3, 3)(K("p[1,1]")) == E("9*p[1,1]"));
    CHECK_THROWS_AS(convolution_power(build_poly_point(), -1, 3), AntipodeUnavailable);
    CHECK_THROWS_AS(convolution_power(build_monoid_algebra(right_zero_monoid()), -1, 0), AntipodeUnavailable);
}

TEST_CASE("takeuchi antipode matches the convolution-inverse solve") {
    for (const auto& h : {build_sym(), build_nsym(), build_qsym(), build_omp({2}), build_poly_primitive()}) {
        INFO(h->name);
        int n = 5;
        auto t = takeuchi_antipode(h, n);
        auto s = antipode_solve(h, n);
        REQUIRE(s);
        for (const auto& k : h->keys_upto(n)) CHECK(t(k) == (*s)(k));
        auto id = identity_map(h, n);
        auto ue = unit_counit(h, h, n);
        for (const auto& k : h->keys_upto(n)) {
            CHECK(convolution(t, id)(k) == ue(k));
            CHECK(convolution(id, t)(k) == ue(k));
        }
    }
    auto nsym = build_nsym();
    CHECK(takeuchi_antipode(nsym, 2)(K("H[2]")) == E("H[1,1] - H[2]"));
    CHECK(takeuchi_antipode(build_sym(), 2)(K("p[2]")) == E("-p[2]"));
    CHECK(takeuchi_antipode(nsym, 2)(K("H[]")) == E("H[]"));
    CHECK_THROWS_AS(takeuchi_antipode(build_group_algebra(cyclic_group(2)), 2), std::invalid_argument);
}

TEST_CASE("finite-type antipodes by full solve") {
    auto dual = build_monoid_dual(symmetric_group_s3());
    auto s = antipode(dual, 0);
    // The dual of a group algebra has S(x_g) = x_{g^-1}.
    CHECK(s(K("x[r1]")) == E("x[r2]"));
    CHECK(s(K("x[s1]")) == E("x[s1]"));
    auto id = identity_map(dual, 0);
    auto ue = unit_counit(dual, dual, 0);
    for (const auto& k : dual->keys_upto(0)) CHECK(convolution(s, id)(k) == ue(k));
}

TEST_CASE("eulerian projection") {
    auto sym = build_sym();
    auto e = eulerian_projection(sym, 5);
    CHECK(e(K("p[1]")) == E("p[1]"));
    CHECK(e(K("p[2,1]")).is_zero());
    CHECK(e(K("p[]")).is_zero());
    for (const auto& h : {build_sym(), build_nsym(), build_omp({2})}) {
        INFO(h->name);
        auto e1 = eulerian_projection(h, 4);
        auto ee = compose_maps(e1, e1);
        for (const auto& k : h->keys_upto(4)) CHECK(ee(k) == e1(k));
        for (int n = 1; n <= 4; ++n) {
            auto prim = primitive_basis(h, n);
            std::vector<Element> image;
            for (const auto& k : h->basis(n)) image.push_back(e1(k));
            CHECK(span_rank(image) == prim.size());
            for (const auto& p : prim) CHECK(e1.apply(p) == p);
            auto both = image;
            both.insert(both.end(), prim.begin(), prim.end());
            CHECK(span_rank(both) == prim.size());
        }
    }
    CHECK_THROWS_AS(eulerian_projection(build_poly_point(), 3), std::invalid_argument);
}

TEST_CASE("primitive bases") {
    auto sym = build_sym();
    CHECK(primitive_basis(sym, 3) == std::vector<Element>{E("p[3]")});
    auto qsym = build_qsym();
    auto q2 = primitive_basis(qsym, 2);
    REQUIRE(q2.size() == 1);
    CHECK(q2[0] == E("M[2]"));
    auto omp = build_omp({3});
    CHECK(primitive_basis(omp, 1).size() == 3);
    for (const auto& p : primitive_basis(build_nsym(), 4)) CHECK(cocommutative_defect(*build_nsym(), p).is_zero());
    CHECK_THROWS_AS(primitive_basis(sym, 0), std::invalid_argument);
    CHECK_THROWS_AS(primitive_basis(build_group_algebra(cyclic_group(2)), 1), std::invalid_argument);
}

TEST_CASE("cocommutative defect") {
    auto sym = build_sym();
    for (const auto& k : sym->keys_upto(4)) CHECK(cocommutative_defect(*sym, Element(k)).is_zero());
    auto qsym = build_qsym();
    CHECK(cocommutative_defect(*qsym, E("M[1,2]")) == E("(M[1] ⊗ M[2]) - (M[2] ⊗ M[1])"));
    auto dual = build_monoid_dual(right_zero_monoid());
    CHECK(cocommutative_defect(*dual, E("x[a]")) ==
          tensor(dual->unit, E("x[a]")) + E("(x[a] ⊗ x[e])") - tensor(E("x[a]"), dual->unit) - E("(x[e] ⊗ x[a])"));
}

TEST_CASE("axiom checker reports injected faults") {
    auto qsym = build_qsym();
    auto bad = with_corrupted_coproduct(qsym, K("M[2]"), E("(M[2] ⊗ M[]) + (M[1] ⊗ M[1])"));
    auto r = verify_bialgebra(*bad, 4);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.failures.empty());
    bool names_m2 = false;
    for (const auto& f : r.failures)
        for (const auto& k : f.inputs) names_m2 = names_m2 || k == K("M[2]");
    CHECK(names_m2);
    CHECK(r.failures.front().inputs.front() == K("M[2]"));

    auto nsym = build_nsym();
    auto bad2 = with_corrupted_coproduct(nsym, K("H[1]"), E("(H[1] ⊗ H[]) + (H[] ⊗ H[1]) + (H[] ⊗ H[])"));
    CHECK_FALSE(verify_bialgebra(*bad2, 3).ok);
}

TEST_CASE("derived coalgebras") {
    auto n = build_nsym_coalgebra_N();
    auto d = diagonal_tensor(n, n);
    CHECK(d->basis(1) == std::vector<BasisKey>{K("(H1 ⊗ H1)")});
    CHECK(d->coproduct(K("(H1 ⊗ H1)")) == E("((H0 ⊗ H0) ⊗ (H1 ⊗ H1)) + ((H1 ⊗ H1) ⊗ (H0 ⊗ H0))"));
    CHECK(d->counit(K("(H0 ⊗ H0)")) == 1);
    CHECK(verify_coalgebra(*d, 5).ok);
    CHECK_THROWS_AS(diagonal_tensor(n, build_matrix_coalgebra(2)), std::invalid_argument);

    auto t = tensor_coalgebra(n, build_sym());
    CHECK(verify_coalgebra(*t, 4).ok);
    CHECK(t->keys_upto(1).size() == 2 * 2);
    auto s = direct_sum_coalgebra(build_matrix_coalgebra(2), build_pointed_coalgebra({"a", "b"}));
    CHECK(s->keys_upto(0).size() == 6);
    CHECK(verify_coalgebra(*s, 0).ok);
    CHECK(s->coproduct(K("in2(<a>)")) == E("(in2(<a>) ⊗ in2(<a>))"));
}

TEST_CASE("linear maps reject keys outside their range") {
    auto sym = build_sym();
    auto id = identity_map(sym, 2);
    CHECK_THROWS_AS(id(K("p[3]")), std::out_of_range);
}
