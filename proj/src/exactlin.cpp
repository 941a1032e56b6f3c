#include "meas/exactlin.hpp"

#include <stdexcept>

namespace meas {

std::string to_string(const Scalar& s) { return s.get_str(); }

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, Scalar(0)) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
        for (long v : r) e_.emplace_back(v);
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Vec DenseMatrix::row(std::size_t i) const {
    return Vec(e_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
               e_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec DenseMatrix::apply(const Vec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("apply: dimension mismatch");
    Vec y(rows_, Scalar(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (sgn(at(i, j)) != 0 && sgn(x[j]) != 0) y[i] += at(i, j) * x[j];
    return y;
}

bool DenseMatrix::operator==(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
}

RrefResult rref(const DenseMatrix& in) {
    RrefResult r{in, {}};
    DenseMatrix& m = r.m;
    std::size_t prow = 0;
    for (std::size_t c = 0; c < m.cols() && prow < m.rows(); ++c) {
        std::size_t sel = m.rows();
        for (std::size_t i = prow; i < m.rows(); ++i)
            if (sgn(m.at(i, c)) != 0) { sel = i; break; }
        if (sel == m.rows()) continue;
        if (sel != prow)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(prow, j));
        Scalar inv = 1 / m.at(prow, c);
        for (std::size_t j = c; j < m.cols(); ++j) m.at(prow, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == prow || sgn(m.at(i, c)) == 0) continue;
            Scalar fac = m.at(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (sgn(m.at(prow, j)) != 0) m.at(i, j) -= fac * m.at(prow, j);
        }
        r.pivots.push_back(c);
        ++prow;
    }
    return r;
}

std::size_t rank(const DenseMatrix& m) { return rref(m).pivots.size(); }

std::vector<Vec> kernel_basis(const DenseMatrix& m) {
    RrefResult r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : r.pivots) is_pivot[p] = true;
    std::vector<Vec> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        Vec v(m.cols(), Scalar(0));
        v[f] = 1;
        for (std::size_t k = 0; k < r.pivots.size(); ++k) v[r.pivots[k]] = -r.m.at(k, f);
        out.push_back(std::move(v));
    }
    return out;
}

SolveResult solve(const DenseMatrix& m, const Vec& v) {
    SolveResult res;
    if (v.size() != m.rows()) {
        res.status = SolveStatus::dimension_mismatch;
        return res;
    }
    DenseMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = v[i];
    }
    RrefResult r = rref(aug);
    if (!r.pivots.empty() && r.pivots.back() == m.cols()) {
        res.status = SolveStatus::no_solution;
        return res;
    }
    res.status = SolveStatus::ok;
    res.x.assign(m.cols(), Scalar(0));
    for (std::size_t k = 0; k < r.pivots.size(); ++k) res.x[r.pivots[k]] = r.m.at(k, m.cols());
    return res;
}

static void axpy(SparseRow& row, const Scalar& a, const SparseRow& other) {
    for (const auto& [c, v] : other) {
        auto it = row.find(c);
        if (it == row.end()) {
            row.emplace(c, -a * v);
        } else {
            it->second -= a * v;
            if (sgn(it->second) == 0) row.erase(it);
        }
    }
}

SparseRow SparseEchelon::reduce(SparseRow row) const {
    auto it = row.begin();
    while (it != row.end()) {
        auto p = pivots_.find(it->first);
        if (p == pivots_.end()) { ++it; continue; }
        std::size_t col = it->first;
        Scalar a = it->second;
        axpy(row, a, p->second);
        it = row.upper_bound(col);
    }
    return row;
}

bool SparseEchelon::insert(SparseRow row) {
    for (auto it = row.begin(); it != row.end();) {
        if (it->first >= cols_) throw std::out_of_range("sparse row column out of range");
        if (sgn(it->second) == 0) it = row.erase(it); else ++it;
    }
    row = reduce(std::move(row));
    if (row.empty()) return false;
    std::size_t lead = row.begin()->first;
    Scalar inv = 1 / row.begin()->second;
    for (auto& [c, v] : row) v *= inv;
    pivots_.emplace(lead, std::move(row));
    return true;
}

std::vector<std::pair<std::size_t, SparseRow>> SparseEchelon::reduced() const {
    std::map<std::size_t, SparseRow> rows = pivots_;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        for (auto jt = rows.begin(); jt->first < it->first; ++jt) {
            auto e = jt->second.find(it->first);
            if (e == jt->second.end()) continue;
            Scalar a = e->second;
            axpy(jt->second, a, it->second);
        }
    }
    return {rows.begin(), rows.end()};
}

std::vector<Vec> SparseEchelon::kernel() const {
    auto rows = reduced();
    std::vector<bool> is_pivot(cols_, false);
    for (const auto& pr : rows) is_pivot[pr.first] = true;
    std::vector<Vec> out;
    for (std::size_t f = 0; f < cols_; ++f) {
        if (is_pivot[f]) continue;
        Vec v(cols_, Scalar(0));
        v[f] = 1;
        for (const auto& [p, row] : rows) {
            auto e = row.find(f);
            if (e != row.end()) v[p] = -e->second;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> kernel_basis_sparse(const std::vector<SparseRow>& rows, std::size_t cols) {
    SparseEchelon e(cols);
    for (const auto& r : rows) e.insert(r);
    return e.kernel();
}

}  // namespace meas
