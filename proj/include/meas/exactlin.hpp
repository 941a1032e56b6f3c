#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace meas {

using Scalar = mpq_class;
using Vec = std::vector<Scalar>;

std::string to_string(const Scalar& s);

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    Vec row(std::size_t i) const;
    Vec apply(const Vec& x) const;

    bool operator==(const DenseMatrix& o) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> e_;
};

struct RrefResult {
    DenseMatrix m;
    std::vector<std::size_t> pivots;
};

RrefResult rref(const DenseMatrix& m);
std::size_t rank(const DenseMatrix& m);
std::vector<Vec> kernel_basis(const DenseMatrix& m);

enum class SolveStatus { ok, no_solution, dimension_mismatch };

struct SolveResult {
    SolveStatus status = SolveStatus::no_solution;
    Vec x;
    bool ok() const { return status == SolveStatus::ok; }
};

SolveResult solve(const DenseMatrix& m, const Vec& v);

// Sparse rows keyed by column index. The reduced form is the same matrix that
// rref() produces on the dense equivalent.
using SparseRow = std::map<std::size_t, Scalar>;

class SparseEchelon {
public:
    explicit SparseEchelon(std::size_t cols) : cols_(cols) {}

    // Returns true when the row enlarged the span.
    bool insert(SparseRow row);
    // Remainder of row after reduction by the current pivots; empty iff in span.
    SparseRow reduce(SparseRow row) const;
    bool contains(const SparseRow& row) const { return reduce(row).empty(); }

    std::size_t rank() const { return pivots_.size(); }
    std::size_t cols() const { return cols_; }

    // Fully reduced rows ordered by pivot column.
    std::vector<std::pair<std::size_t, SparseRow>> reduced() const;
    std::vector<Vec> kernel() const;

private:
    std::size_t cols_;
    std::map<std::size_t, SparseRow> pivots_;
};

std::vector<Vec> kernel_basis_sparse(const std::vector<SparseRow>& rows, std::size_t cols);

}  // namespace meas
