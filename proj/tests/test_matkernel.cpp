#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "pencilrange/matkernel.hpp"
#include "test_support.hpp"

using namespace pencilrange;
using pr_test::rng;

namespace {

// Test-only oracle: cyclic complex Jacobi for Hermitian matrices.  Each
// rotation peels the phase off a_pq and applies a real Jacobi rotation, so
// the iteration is independent of the Householder+QL implementation path.
std::vector<double> jacobi_eigvals_oracle(CMatrix a) {
    const std::size_t n = a.rows();
    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
        if (off <= 1e-14 * scale * double(n)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx gamma = a(p, q);
                const double g = std::abs(gamma);
                if (g <= 1e-300) continue;
                const cplx phase = gamma / g;  // a_pq = g * phase
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // R = diag(1, conj(phase)) * [[c, s], [-s, c]]
                const cplx r11 = c, r12 = s;
                const cplx r21 = -s * std::conj(phase), r22 = c * std::conj(phase);
                for (std::size_t i = 0; i < n; ++i) {  // columns p,q <- [cols]*R
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = aip * r11 + aiq * r21;
                    a(i, q) = aip * r12 + aiq * r22;
                }
                for (std::size_t j = 0; j < n; ++j) {  // rows p,q <- R^H * [rows]
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = std::conj(r11) * apj + std::conj(r21) * aqj;
                    a(q, j) = std::conj(r12) * apj + std::conj(r22) * aqj;
                }
            }
        }
    }
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = a(i, i).real();
    std::sort(vals.begin(), vals.end());
    return vals;
}

double spectral_norm(const CMatrix& m) {
    const auto [lmin, lmax] = hermitian_extremes(m.adjoint() * m);
    (void)lmin;
    return std::sqrt(std::max(lmax, 0.0));
}

}  // namespace

TEST_CASE("jacobi oracle reproduces diagonal inputs") {
    CMatrix d = CMatrix::diagonal({cplx(3, 0), cplx(-1, 0), cplx(0.25, 0)});
    const auto vals = jacobi_eigvals_oracle(d);
    CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(vals[1] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(vals[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hermitian_eig on diag(2,1) and identity") {
    const auto e = hermitian_eig(CMatrix::diagonal({cplx(2, 0), cplx(1, 0)}));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(2.0));

    const auto e5 = hermitian_eig(CMatrix::identity(5));
    for (double v : e5.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig matches jacobi oracle on random 6x6") {
    auto g = rng(42);
    for (int rep = 0; rep < 5; ++rep) {
        const CMatrix m = pr_test::random_hermitian(6, g);
        const auto ours = hermitian_eig(m);
        const auto oracle = jacobi_eigvals_oracle(m);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(ours.values[i] == doctest::Approx(oracle[i]).epsilon(0).scale(1).epsilon(1e-9));
    }
}

TEST_CASE("hermitian_eig residual and unitarity contracts") {
    auto g = rng(7);
    const std::size_t n = 12;
    const CMatrix m = pr_test::random_hermitian(n, g);
    const auto e = hermitian_eig(m);
    const double mnorm = spectral_norm(m);

    const CMatrix mv = m * e.vectors;
    for (std::size_t j = 0; j < n; ++j) {
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res += std::norm(mv(i, j) - e.values[j] * e.vectors(i, j));
        CHECK(std::sqrt(res) <= 1e-10 * mnorm);
    }
    const CMatrix vhv = e.vectors.adjoint() * e.vectors;
    const CMatrix eye = CMatrix::identity(n);
    CHECK((vhv - eye).max_abs() <= 1e-10);
}

TEST_CASE("hermitian_eig eigenvalue sum equals trace") {
    auto g = rng(3);
    for (int rep = 0; rep < 4; ++rep) {
        const CMatrix m = pr_test::random_hermitian(9, g);
        const auto vals = hermitian_eigvals(m);
        double tr = 0.0;
        for (std::size_t i = 0; i < 9; ++i) tr += m(i, i).real();
        double sum = 0.0;
        for (double v : vals) sum += v;
        CHECK(std::abs(sum - tr) <= 1e-9 * std::max(1.0, m.max_abs()));
    }
}

TEST_CASE("Weyl monotonicity under PSD perturbation") {
    auto g = rng(11);
    const CMatrix m = pr_test::random_hermitian(7, g);
    CMatrix p = pr_test::random_hpd(7, g);
    const auto base = hermitian_eigvals(m);
    const auto bumped = hermitian_eigvals(m + p);
    for (std::size_t i = 0; i < 7; ++i) CHECK(bumped[i] >= base[i] - 1e-9);
}

TEST_CASE("hermitian_eig rejects non-hermitian input") {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = cplx(0, 1);
    m(1, 0) = cplx(0, 1);  // hermitian would need -i
    m(1, 1) = 1.0;
    CHECK_THROWS_AS((void)hermitian_eig(m), NotHermitian);
}

TEST_CASE("hermitian fast paths: tridiagonal and extremes") {
    auto g = rng(19);
    const std::size_t n = 40;
    CMatrix tri(n, n);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        tri(i, i) = nd(g);
        if (i + 1 < n) {
            const cplx off = pr_test::random_cplx(g);
            tri(i, i + 1) = off;
            tri(i + 1, i) = std::conj(off);
        }
    }
    const auto vals = hermitian_eigvals(tri);
    const auto [lmin, lmax] = hermitian_extremes(tri);
    CHECK(lmin == doctest::Approx(vals.front()).epsilon(1e-11));
    CHECK(lmax == doctest::Approx(vals.back()).epsilon(1e-11));

    const auto [top, vec] = hermitian_top_eigpair(tri);
    CHECK(top == doctest::Approx(vals.back()).epsilon(1e-10));
    const auto mv = tri * vec;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(mv[i] - top * vec[i]);
    CHECK(std::sqrt(res) <= 1e-8 * std::max(1.0, tri.max_abs()));
}

TEST_CASE("general_eig trivial examples") {
    CMatrix nil(2, 2);
    nil(0, 1) = 1.0;
    auto e = general_eig(nil);
    CHECK(std::abs(e[0]) <= 1e-12);
    CHECK(std::abs(e[1]) <= 1e-12);

    e = general_eig(CMatrix::diagonal({cplx(1, 1), cplx(2, 0)}));
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(e[0] - cplx(1, 1)) <= 1e-12);
    CHECK(std::abs(e[1] - cplx(2, 0)) <= 1e-12);
}

TEST_CASE("general_eig companion matrix of z^3 - 1") {
    CMatrix c(3, 3);
    c(0, 2) = 1.0;
    c(1, 0) = 1.0;
    c(2, 1) = 1.0;
    auto e = general_eig(c);
    REQUIRE(e.size() == 3);
    for (const cplx z : e) {
        // cross-check by evaluating the polynomial
        CHECK(std::abs(z * z * z - 1.0) <= 1e-10);
    }
    // roots are distinct cube roots of unity
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    CHECK(std::abs(e[0] - std::polar(1.0, -2.0 * M_PI / 3.0)) <= 1e-10);
    CHECK(std::abs(e[1] - cplx(1, 0)) <= 1e-10);
    CHECK(std::abs(e[2] - std::polar(1.0, 2.0 * M_PI / 3.0)) <= 1e-10);
}

TEST_CASE("general_eig sigma_min residual and determinant product") {
    auto g = rng(23);
    for (int rep = 0; rep < 4; ++rep) {
        const std::size_t n = 8;
        const CMatrix m = pr_test::random_matrix(n, g);
        const auto e = general_eig(m);
        const double mnorm = spectral_norm(m);
        for (const cplx lam : e) {
            CMatrix shifted = m;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lam;
            CHECK(smallest_singular(shifted) <= 1e-8 * mnorm);
        }
        cplx prod(1.0, 0.0);
        for (const cplx lam : e) prod *= lam;
        const cplx det = lu_determinant(lu_factor(m));
        CHECK(std::abs(prod - det) <= 1e-7 * std::abs(det));
    }
}

TEST_CASE("generalized_eig diagonal examples") {
    auto e = generalized_eig(CMatrix::diagonal({cplx(2, 0), cplx(6, 0)}),
                             CMatrix::diagonal({cplx(1, 0), cplx(4, 0)}));
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(e[0] - 1.5) <= 1e-12);
    CHECK(std::abs(e[1] - 2.0) <= 1e-12);

    e = generalized_eig(CMatrix::diagonal({cplx(1, 0), cplx(-2, 0)}),
                        CMatrix::diagonal({cplx(1, 0), cplx(-1, 0)}));
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(e[0] - 1.0) <= 1e-12);
    CHECK(std::abs(e[1] - 2.0) <= 1e-12);
}

TEST_CASE("generalized_eig equals general_eig for B = I and honors residual") {
    auto g = rng(31);
    const std::size_t n = 7;
    const CMatrix a = pr_test::random_matrix(n, g);
    auto e1 = generalized_eig(a, CMatrix::identity(n));
    auto e2 = general_eig(a);
    auto key = [](cplx z) { return std::make_pair(z.real(), z.imag()); };
    std::sort(e1.begin(), e1.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
    std::sort(e2.begin(), e2.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e1[i] - e2[i]) <= 1e-9);

    const CMatrix b = pr_test::random_hpd(n, g);
    const auto e = generalized_eig(a, b);
    for (const cplx lam : e) {
        CMatrix pencil = a;
        pencil -= lam * b;
        const double tol = 1e-7 * (spectral_norm(a) + std::abs(lam) * spectral_norm(b));
        CHECK(smallest_singular(pencil) <= tol);
    }
}

TEST_CASE("generalized_eig signals SingularB on ill-conditioned B") {
    const CMatrix a = CMatrix::identity(2);
    const CMatrix b = CMatrix::diagonal({cplx(1, 0), cplx(1e-11, 0)});
    CHECK_THROWS_AS((void)generalized_eig(a, b), SingularB);
}

TEST_CASE("generalized_eig on simultaneously diagonal pairs is entrywise ratio") {
    auto g = rng(5);
    std::vector<cplx> av(6), bv(6);
    for (auto& v : av) v = pr_test::random_cplx(g);
    for (auto& v : bv) v = pr_test::random_cplx(g) + cplx(3.0, 0.0);
    auto e = generalized_eig(CMatrix::diagonal(av), CMatrix::diagonal(bv));
    std::vector<cplx> expect(6);
    for (int i = 0; i < 6; ++i) expect[i] = av[i] / bv[i];
    auto key = [](cplx z) { return std::make_pair(z.real(), z.imag()); };
    std::sort(e.begin(), e.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
    std::sort(expect.begin(), expect.end(), [&](cplx x, cplx y) { return key(x) < key(y); });
    for (int i = 0; i < 6; ++i) CHECK(std::abs(e[i] - expect[i]) <= 1e-12 * std::abs(expect[i]) + 1e-12);
}

TEST_CASE("polar_multiplier trivial cases") {
    auto g = rng(13);
    CMatrix t = pr_test::random_hpd(4, g);  // Hermitian PSD (actually PD)
    const CMatrix b = polar_multiplier(t, cplx(-1, 0));
    CHECK((b - CMatrix::identity(4)).max_abs() <= 1e-10);

    const CMatrix b2 = polar_multiplier(CMatrix::diagonal({cplx(-1, 0), cplx(2, 0)}), cplx(0, 0));
    CHECK(std::abs(b2(0, 0) - cplx(-1, 0)) <= 1e-12);
    CHECK(std::abs(b2(1, 1) - cplx(1, 0)) <= 1e-12);
    CHECK(std::abs(b2(0, 1)) <= 1e-12);
}

TEST_CASE("polar_multiplier: B(T-lambda) is the modulus, B unitary off spectrum") {
    auto g = rng(37);
    for (int rep = 0; rep < 4; ++rep) {
        const std::size_t n = 5;
        const CMatrix t = pr_test::random_matrix(n, g);
        const cplx lam(0.3, -0.2);
        CMatrix m = t;
        for (std::size_t i = 0; i < n; ++i) m(i, i) -= lam;
        const CMatrix b = polar_multiplier(t, lam);

        const CMatrix prod = b * m;
        const double scale = std::max(1.0, prod.max_abs());
        CHECK((prod - prod.adjoint()).max_abs() <= 1e-9 * scale);

        // min eig of B(T-lambda) equals sigma_min(T-lambda): oracle via Jacobi on M^H M
        const auto mm_vals = jacobi_eigvals_oracle(m.adjoint() * m);
        const double smin_oracle = std::sqrt(std::max(mm_vals.front(), 0.0));
        CMatrix herm = prod;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx v = 0.5 * (herm(i, j) + std::conj(herm(j, i)));
                herm(i, j) = v;
                herm(j, i) = std::conj(v);
            }
        const auto pe = hermitian_eigvals(herm);
        CHECK(pe.front() >= -1e-9);
        CHECK(std::abs(pe.front() - smin_oracle) <= 1e-9 * std::max(1.0, smin_oracle));

        const CMatrix bhb = b.adjoint() * b;
        CHECK((bhb - CMatrix::identity(n)).max_abs() <= 1e-9);
    }
}

TEST_CASE("hpd_invsqrt examples and residual") {
    const CMatrix s = hpd_invsqrt(CMatrix::diagonal({cplx(4, 0), cplx(9, 0)}));
    CHECK(std::abs(s(0, 0) - 0.5) <= 1e-12);
    CHECK(std::abs(s(1, 1) - 1.0 / 3.0) <= 1e-12);

    CHECK((hpd_invsqrt(CMatrix::identity(3)) - CMatrix::identity(3)).max_abs() <= 1e-12);

    auto g = rng(17);
    const CMatrix b = pr_test::random_hpd(5, g);
    const CMatrix sb = hpd_invsqrt(b);
    CHECK((sb * b * sb - CMatrix::identity(5)).max_abs() <= 1e-9);
    CHECK(sb.is_hermitian(1e-9));

    CHECK_THROWS_AS((void)hpd_invsqrt(CMatrix::diagonal({cplx(1, 0), cplx(-0.5, 0)})), NotPositive);
}

TEST_CASE("banded LU agrees with dense LU solves") {
    auto g = rng(41);
    const std::size_t n = 30;
    CMatrix dense(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(n - 1, i + 1); ++j)
            dense(i, j) = pr_test::random_cplx(g);
        dense(i, i) += 4.0;
    }
    const BandMatrix band = BandMatrix::from_dense(dense, 2, 1);
    std::vector<cplx> rhs(n);
    for (auto& v : rhs) v = pr_test::random_cplx(g);

    std::vector<cplx> x1 = rhs;
    band_lu_solve(band_lu_factor(band), x1);
    std::vector<cplx> x2 = rhs;
    lu_solve_inplace(lu_factor(dense), x2);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-10);

    const double s1 = smallest_singular_banded(band);
    const double s2 = smallest_singular(dense);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-8));
}

TEST_CASE("sturm counts and tridiag extremes agree with QL values") {
    auto g = rng(43);
    const std::size_t n = 50;
    RealSymTridiag t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (auto& v : t.diag) v = nd(g);
    for (auto& v : t.off) v = nd(g);

    const auto vals = tridiag_eigvals(t);
    CHECK(tridiag_lambda_min(t) == doctest::Approx(vals.front()).epsilon(1e-11));
    CHECK(tridiag_lambda_max(t) == doctest::Approx(vals.back()).epsilon(1e-11));

    const double mid = 0.5 * (vals[20] + vals[21]);
    CHECK(sturm_count_below(t, mid) == 21);
}
