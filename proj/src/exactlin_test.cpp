#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meas/exactlin.hpp"

#include <random>

using namespace meas;

namespace {

DenseMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = d(rng);
    return m;
}

// Determinant by cofactor expansion, for small rank checks.
Scalar det(const DenseMatrix& m) {
    std::size_t n = m.rows();
    if (n == 0) return 1;
    if (n == 1) return m.at(0, 0);
    Scalar s = 0;
    for (std::size_t j = 0; j < n; ++j) {
        DenseMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0, kk = 0; k < n; ++k)
                if (k != j) minor.at(i - 1, kk++) = m.at(i, k);
        s += (j % 2 ? -1 : 1) * m.at(0, j) * det(minor);
    }
    return s;
}

// Rank as the largest nonsingular square minor.
std::size_t rank_by_minors(const DenseMatrix& m) {
    std::size_t best = 0;
    std::size_t r = m.rows(), c = m.cols();
    for (std::size_t rm = 1; rm < (1u << r); ++rm)
        for (std::size_t cm = 1; cm < (1u << c); ++cm) {
            std::size_t k = static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(rm)));
            if (k != static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(cm))) || k <= best) continue;
            DenseMatrix sub(k, k);
            for (std::size_t i = 0, ii = 0; i < r; ++i) {
                if (!(rm >> i & 1)) continue;
                for (std::size_t j = 0, jj = 0; j < c; ++j)
                    if (cm >> j & 1) sub.at(ii, jj++) = m.at(i, j);
                ++ii;
            }
            if (det(sub) != 0) best = k;
        }
    return best;
}

}  // namespace

TEST_CASE("rref of a known matrix") {
    DenseMatrix m{{1, 2, 3}, {2, 4, 7}, {1, 2, 4}};
    auto r = rref(m);
    CHECK(r.pivots == std::vector<std::size_t>{0, 2});
    DenseMatrix want{{1, 2, 0}, {0, 0, 1}, {0, 0, 0}};
    CHECK(r.m == want);
    CHECK(rank(m) == 2);
}

TEST_CASE("rank agrees with the minor oracle") {
    std::mt19937 rng(7);
    for (int t = 0; t < 40; ++t) {
        auto m = random_matrix(rng, 1 + t % 4, 1 + (t / 4) % 4, -1, 1);
        CHECK(rank(m) == rank_by_minors(m));
    }
}

TEST_CASE("kernel vectors are annihilated and independent") {
    std::mt19937 rng(11);
    for (int t = 0; t < 30; ++t) {
        auto m = random_matrix(rng, 3, 5, -2, 2);
        auto k = kernel_basis(m);
        CHECK(k.size() + rank(m) == 5);
        for (const auto& v : k)
            for (const auto& x : m.apply(v)) CHECK(x == 0);
        if (!k.empty()) {
            DenseMatrix km(k.size(), 5);
            for (std::size_t i = 0; i < k.size(); ++i)
                for (std::size_t j = 0; j < 5; ++j) km.at(i, j) = k[i][j];
            CHECK(rank(km) == k.size());
        }
    }
}

TEST_CASE("solve returns a solution or reports none") {
    DenseMatrix m{{1, 1}, {1, -1}};
    auto s = solve(m, {Scalar(3), Scalar(1)});
    REQUIRE(s.ok());
    CHECK(s.x == Vec{2, 1});

    DenseMatrix sing{{1, 1}, {2, 2}};
    CHECK(solve(sing, {Scalar(1), Scalar(3)}).status == SolveStatus::no_solution);
    auto free = solve(sing, {Scalar(1), Scalar(2)});
    REQUIRE(free.ok());
    CHECK(free.x == Vec{1, 0});

    CHECK(solve(m, {Scalar(1)}).status == SolveStatus::dimension_mismatch);
}

TEST_CASE("exact rationals survive elimination") {
    DenseMatrix m{{3, 1}, {1, 3}};
    auto s = solve(m, {Scalar(1), Scalar(0)});
    REQUIRE(s.ok());
    CHECK(s.x[0] == Scalar(3, 8));
    CHECK(s.x[1] == Scalar(-1, 8));
    CHECK(to_string(s.x[1]) == "-1/8");
}

TEST_CASE("empty and zero matrices") {
    DenseMatrix z(2, 3);
    CHECK(rank(z) == 0);
    CHECK(kernel_basis(z).size() == 3);
    DenseMatrix e(0, 0);
    CHECK(rank(e) == 0);
    CHECK(kernel_basis(e).empty());
}

TEST_CASE("sparse echelon matches dense rref") {
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        auto m = random_matrix(rng, 4, 6, -1, 2);
        SparseEchelon se(6);
        std::vector<SparseRow> rows;
        for (std::size_t i = 0; i < 4; ++i) {
            SparseRow r;
            for (std::size_t j = 0; j < 6; ++j)
                if (m.at(i, j) != 0) r[j] = m.at(i, j);
            rows.push_back(r);
            se.insert(r);
        }
        auto d = rref(m);
        CHECK(se.rank() == d.pivots.size());
        auto red = se.reduced();
        for (std::size_t i = 0; i < red.size(); ++i) {
            CHECK(red[i].first == d.pivots[i]);
            for (std::size_t j = 0; j < 6; ++j) {
                auto it = red[i].second.find(j);
                Scalar v = it == red[i].second.end() ? Scalar(0) : it->second;
                CHECK(v == d.m.at(i, j));
            }
        }
        CHECK(kernel_basis_sparse(rows, 6) == kernel_basis(m));
    }
}

TEST_CASE("sparse membership") {
    SparseEchelon se(3);
    CHECK(se.insert({{0, 1}, {1, 1}}));
    CHECK_FALSE(se.insert({{0, 2}, {1, 2}}));
    CHECK(se.contains({{0, -3}, {1, -3}}));
    CHECK_FALSE(se.contains({{2, 1}}));
    CHECK(se.reduce({{0, 1}, {2, 5}}) == SparseRow{{1, -1}, {2, 5}});
}
