#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/catalog.hpp"

#include <set>

using namespace meas;

namespace {

BasisKey K(const char* s) { return parse_key(s); }
Element E(const char* s) { return parse_element(s); }

}  // namespace

TEST_CASE("every registered name builds") {
    std::set<std::string> seen;
    for (const auto& n : bialgebra_names()) {
        CAPTURE(n);
        CHECK(seen.insert(n).second);
        CHECK_NOTHROW(bialgebra_by_name(n));
    }
    for (const auto& n : covering_names()) {
        CAPTURE(n);
        CHECK(seen.insert(n).second);
        auto f = covering_by_name(n);
        CHECK(f.name == n);
        CHECK(f.source);
    }
    CHECK(covering_names().size() == 8 + bialgebra_names().size());
}

TEST_CASE("unknown names and bad parameters") {
    CHECK_THROWS_WITH_AS(bialgebra_by_name("lie"), "unknown bialgebra: lie", std::invalid_argument);
    CHECK_THROWS_WITH_AS(covering_by_name("nope"), "unknown covering: nope", std::invalid_argument);
    CHECK_THROWS_WITH_AS(covering_by_name("identity-nope"), "unknown bialgebra: nope", std::invalid_argument);
    HandleSpec s;
    s.builder = "omp";
    s.params["m"] = "4x";
    CHECK_THROWS_WITH_AS(build_bialgebra(s), "parameter m of omp is not an integer: 4x", std::invalid_argument);
    s.builder = "group";
    s.params.clear();
    CHECK_THROWS_WITH_AS(build_bialgebra(s), "group needs parameter table", std::invalid_argument);
    HandleSpec c;
    c.builder = "coalg";
    CHECK_THROWS_AS(build_coalgebra(c), std::invalid_argument);
    c.builder = "cone";
    CHECK_THROWS_WITH_AS(build_coalgebra(c), "unknown coalgebra builder: cone", std::invalid_argument);
}

TEST_CASE("coalgebra builders") {
    HandleSpec s;
    s.builder = "pointed";
    s.params["names"] = "x,y,z";
    CHECK(build_coalgebra(s)->keys_upto(0).size() == 3);
    s.builder = "matrix";
    s.params = {{"n", "2"}};
    CHECK(build_coalgebra(s)->keys_upto(0).size() == 4);
    s.builder = "N";
    CHECK(build_coalgebra(s)->keys_upto(3).size() == 4);
    CHECK(build_coalgebra(coalg_of(bialgebra_spec("sym")))->name == "Sym");
}

TEST_CASE("registry parameters reach the handles") {
    RegistryParams p;
    p.m = 2;
    p.window = 3;
    CHECK(bialgebra_by_name("omp", p)->basis(1).size() == 2);
    CHECK(bialgebra_by_name("omp")->basis(1).size() == 4);
    CHECK(bialgebra_spec("laurent", p).params.at("window") == "3");
    CHECK(bialgebra_spec("sym", p).params.empty());
}

TEST_CASE("OMP covering values") {
    auto f = build_omp_covering({4});
    auto H = [](int n) { return BasisKey::power('H', n); };
    CHECK(f.value(K("w[{1,3}]"), H(2)) == E("H[2]"));
    CHECK(f.value(K("w[{1,3}]"), H(1)).is_zero());
    CHECK(f.value(K("w[{1}|{2,3}]"), H(3)) == E("H[1,2]"));
    auto g = build_omp_covering({4}, true);
    CHECK(g.value(K("w[{1,3}]"), H(2)) == E("2*H[2]"));
    CHECK(g.value(K("w[{1}|{2,3}]"), H(3)) == E("2*H[1,2]"));
}

TEST_CASE("registry verdicts at low degree") {
    auto v = [](const char* n, int N) { return verify_covering(covering_by_name(n), N); };
    CHECK(v("nsym-to-sym", 4).ok());
    CHECK(v("poly-to-sym", 4).ok());
    CHECK(v("can-sym", 4).ok());
    CHECK(v("monoid-dual-cover", 2).ok());
    CHECK(v("laurent-to-group", 2).ok());
    auto q = v("poly-to-qsym", 3);
    CHECK(q.measuring_ok);
    CHECK_FALSE(q.surjective_ok);
    CHECK_FALSE(v("omp-to-nsym", 3).coalgebra_map_ok);
    CHECK(v("omp-to-nsym-scaled", 3).ok());
    for (const auto& n : bialgebra_names()) {
        CAPTURE(n);
        CHECK(verify_covering(covering_by_name("identity-" + n), 2).ok());
    }
}

TEST_CASE("the monoid example and the two-point data") {
    auto m = example_monoid();
    CHECK(m.elements.size() == 3);
    CHECK_FALSE(m.is_group());
    for (const auto& x : m.elements)
        for (const auto& y : m.elements)
            if (x != m.identity && y != m.identity) CHECK(m.mul(x, y) == y);
    auto ex = two_point_example(build_sym());
    CHECK(ex.f.C->keys_upto(0).size() == 2);
    CHECK(ex.g.C->keys_upto(0).size() == 1);
    CHECK(ex.t.t(BasisKey::point("y")) == Element(BasisKey::point("z")));
    CHECK(ex.f.value(K("p[2]"), BasisKey::point("x")) == E("p[2]"));
}
