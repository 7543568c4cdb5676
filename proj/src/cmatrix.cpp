#include "pencilrange/cmatrix.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pencilrange {

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(const std::vector<cplx>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::from_rows(std::size_t rows, std::size_t cols,
                           std::initializer_list<cplx> entries) {
    if (entries.size() != rows * cols)
        throw std::invalid_argument("from_rows: entry count mismatch");
    CMatrix m(rows, cols);
    std::size_t k = 0;
    for (cplx v : entries) m.a_[k++] = v;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
    assert(lhs.cols_ == rhs.rows_);
    CMatrix out(lhs.rows_, rhs.cols_);
    const std::size_t n = lhs.rows_, m = rhs.cols_, k = lhs.cols_;
    for (std::size_t i = 0; i < n; ++i) {
        cplx* oi = out.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const cplx lip = lhs(i, p);
            if (lip == cplx(0.0, 0.0)) continue;
            const cplx* rp = rhs.row(p);
            for (std::size_t j = 0; j < m; ++j) oi[j] += lip * rp[j];
        }
    }
    return out;
}

std::vector<cplx> CMatrix::operator*(const std::vector<cplx>& x) const {
    assert(x.size() == cols_);
    std::vector<cplx> y(rows_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rows_; ++i) {
        const cplx* ri = row(i);
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) acc += ri[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool CMatrix::is_hermitian(double tol_factor) const {
    if (!is_square()) return false;
    const double tol = tol_factor * std::max(max_abs(), 1e-300);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

double CMatrix::offtridiagonal_max() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i + 1 < j || j + 1 < i) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

bool CMatrix::is_diagonal_within(double tol) const {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
}

CMatrix CMatrix::compress(const std::vector<std::size_t>& idx) const {
    CMatrix m(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(idx[i], idx[j]);
    return m;
}

cplx rayleigh(const CMatrix& m, const std::vector<cplx>& x) {
    const auto y = m * x;
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc += y[i] * std::conj(x[i]);
    return acc;
}

cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    // <x, y> linear in the first argument
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * std::conj(y[i]);
    return acc;
}

double norm2(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

void normalize(std::vector<cplx>& x) {
    const double n = norm2(x);
    if (n > 0.0)
        for (auto& v : x) v /= n;
}

}  // namespace pencilrange
