#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pencilrange/cmatrix.hpp"
#include "pencilrange/errors.hpp"

namespace pencilrange {

// ---------------------------------------------------------------------------
// Hermitian eigensolver: Householder tridiagonalization + implicit-shift QL.
// Columns that are already tridiagonal are skipped, so diagonal/tridiagonal
// inputs cost O(n^2) instead of O(n^3).
// ---------------------------------------------------------------------------

struct HermitianEig {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // unitary, column k pairs with values[k]
};

/// Full decomposition M = V diag(values) V*.  Throws NotHermitian /
/// NoConvergence (cap: 30*n QL iterations in total).
HermitianEig hermitian_eig(const CMatrix& m);

/// Eigenvalues only (ascending), same reduction without vector accumulation.
std::vector<double> hermitian_eigvals(const CMatrix& m);

/// Extreme eigenvalues (lambda_min, lambda_max) via tridiagonal Sturm
/// bisection; cheap for banded input.
std::pair<double, double> hermitian_extremes(const CMatrix& m);

/// Largest eigenvalue with a matching eigenvector (inverse iteration on the
/// tridiagonal form).
std::pair<double, std::vector<cplx>> hermitian_top_eigpair(const CMatrix& m);

// ---------------------------------------------------------------------------
// General complex eigenvalues: balancing + Householder Hessenberg reduction +
// Wilkinson-shifted QR.
// ---------------------------------------------------------------------------

/// Multiset of the n eigenvalues of a square complex matrix. Values only.
std::vector<cplx> general_eig(const CMatrix& m);

/// sigma(A, B) via B^{-1} A.  Throws SingularB if cond_2(B) > 1e10; callers
/// fall back to lambda-sweep membership in that case.
std::vector<cplx> generalized_eig(const CMatrix& a, const CMatrix& b);

// ---------------------------------------------------------------------------
// Factorizations and derived kernels
// ---------------------------------------------------------------------------

struct LuFactors {
    CMatrix lu;
    std::vector<int> piv;
    int sign = 1;
    bool singular = false;
};

LuFactors lu_factor(CMatrix m);
void lu_solve_inplace(const LuFactors& f, std::vector<cplx>& rhs);
/// Solve M X = RHS column by column.
CMatrix lu_solve_matrix(const LuFactors& f, const CMatrix& rhs);
cplx lu_determinant(const LuFactors& f);

/// Smallest singular value, sqrt(lambda_min(M* M)).
double smallest_singular(const CMatrix& m);
/// sigma_max / sigma_min; infinity when singular.
double cond2(const CMatrix& m);

/// Polar-decomposition multiplier: B = U* where T - lambda = U |T - lambda|.
/// B (T - lambda) = |T - lambda| is Hermitian PSD; B is unitary when
/// sigma_min(T - lambda) > 0, otherwise the partial isometry extended by zero.
CMatrix polar_multiplier(const CMatrix& t, cplx lambda);

/// S with S B S = I for Hermitian positive definite B.  Throws NotPositive if
/// the smallest eigenvalue is below 1e-12 * lambda_max.
CMatrix hpd_invsqrt(const CMatrix& b);

// ---------------------------------------------------------------------------
// Banded storage (complex, general) for discretized differential sections:
// LU with partial pivoting and inverse-iteration kernels built on it.
// ---------------------------------------------------------------------------

class BandMatrix {
public:
    BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), a_(n * (kl + ku + 1), cplx(0.0, 0.0)) {}

    static BandMatrix from_dense(const CMatrix& m, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }

    cplx get(std::size_t i, std::size_t j) const {
        if (j + kl_ < i || i + ku_ < j) return cplx(0.0, 0.0);
        return a_[i * (kl_ + ku_ + 1) + (j + kl_ - i)];
    }
    void set(std::size_t i, std::size_t j, cplx v) {
        a_[i * (kl_ + ku_ + 1) + (j + kl_ - i)] = v;
    }

    std::vector<cplx> multiply(const std::vector<cplx>& x) const;
    BandMatrix adjoint() const;

private:
    std::size_t n_, kl_, ku_;
    std::vector<cplx> a_;
};

struct BandLu {
    std::size_t n = 0, kl = 0, ku = 0;
    std::vector<cplx> a;    // n x (2*kl + ku + 1), extra kl rows of fill
    std::vector<int> piv;
    bool singular = false;
};

BandLu band_lu_factor(const BandMatrix& m);
void band_lu_solve(const BandLu& f, std::vector<cplx>& rhs);

/// sigma_min(M) by inverse power iteration on M* M using banded solves of M
/// and M*.  Deterministic start; the returned value is certified by a final
/// residual evaluation ||M u|| with u the computed right singular vector.
double smallest_singular_banded(const BandMatrix& m, int max_iter = 200,
                                double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Real symmetric tridiagonal utilities (Sturm counts) used by the fast
// lambda_max paths and by pencil gap scans.
// ---------------------------------------------------------------------------

struct RealSymTridiag {
    std::vector<double> diag;
    std::vector<double> off;  // size diag.size()-1
};

/// Number of eigenvalues strictly below x (LDL^T sign count).
int sturm_count_below(const RealSymTridiag& t, double x);
double tridiag_lambda_max(const RealSymTridiag& t, double tol_rel = 1e-14);
double tridiag_lambda_min(const RealSymTridiag& t, double tol_rel = 1e-14);
/// Extreme-eigenvalue bisection stopped at an absolute width; cheap when the
/// caller only compares against a coarse threshold.
double tridiag_lambda_max_abs(const RealSymTridiag& t, double abs_tol);
double tridiag_lambda_min_abs(const RealSymTridiag& t, double abs_tol);
std::vector<double> tridiag_eigvals(const RealSymTridiag& t);

}  // namespace pencilrange
