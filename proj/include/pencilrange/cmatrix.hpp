#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace pencilrange {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The universal carrier for truncated
/// operators and compressions.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(const std::vector<cplx>& d);
    /// Row-major literal, e.g. CMatrix::from_rows(2, 2, {a, b, c, d}).
    static CMatrix from_rows(std::size_t rows, std::size_t cols,
                             std::initializer_list<cplx> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return a_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }
    cplx* row(std::size_t i) { return a_.data() + i * cols_; }
    const cplx* row(std::size_t i) const { return a_.data() + i * cols_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(cplx s);

    friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
    friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
    friend CMatrix operator*(cplx s, CMatrix m) { return m *= s; }
    friend CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);

    std::vector<cplx> operator*(const std::vector<cplx>& x) const;

    /// max_{ij} |m_ij|
    double max_abs() const;
    double frobenius_norm() const;
    /// max|M - M*| <= tol_factor * max|M|  (tol_factor defaults to the
    /// hermitian_tol of the finite-scale contract)
    bool is_hermitian(double tol_factor = 1e-12) const;
    /// max|M_ij| over |i-j| > 1; used by structure-aware eigensolver paths
    double offtridiagonal_max() const;
    bool is_diagonal_within(double tol) const;

    /// Principal submatrix rows/cols [idx...] in the given order.
    CMatrix compress(const std::vector<std::size_t>& idx) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// <Mx, x>; does not normalize x.
cplx rayleigh(const CMatrix& m, const std::vector<cplx>& x);
/// <x, y> = sum_i x_i conj(y_i), linear in the first argument.
cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y);
double norm2(const std::vector<cplx>& x);
void normalize(std::vector<cplx>& x);

}  // namespace pencilrange
