#include "pencilrange/matkernel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace pencilrange {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double safe_hypot(double a, double b) { return std::hypot(a, b); }

// --- Householder tridiagonalization --------------------------------------
//
// Reduces Hermitian M to real symmetric tridiagonal (d, e) by unitary
// similarity.  Reflections with negligible below-subdiagonal mass are
// skipped, so banded input reduces in O(n^2).  When `accumulate` is set, z
// holds the unitary U^H with M = (U^H) T_complex (U^H)^H before the phase
// pass; the phase pass then folds the subdiagonal phases into z's columns.

struct TridiagForm {
    std::vector<double> d;
    std::vector<double> e;  // n-1 entries
    CMatrix z;              // populated iff accumulate
};

TridiagForm tridiagonalize(const CMatrix& m_in, bool accumulate) {
    const std::size_t n = m_in.rows();
    CMatrix a = m_in;
    const double scale = std::max(a.max_abs(), 1e-300);
    const double skip_tol = 1e-300 + kEps * scale * 1e-2;

    std::vector<cplx> ecplx(n > 0 ? n - 1 : 0, cplx(0.0, 0.0));
    std::vector<std::vector<cplx>> reflectors;  // v with v[0]=1, support k+1..n-1
    std::vector<cplx> taus;
    std::vector<std::size_t> refl_col;

    std::vector<cplx> v(n), p(n), w(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) xnorm2 += std::norm(a(i, k));
        const cplx alpha = a(k + 1, k);
        if (std::sqrt(xnorm2) <= skip_tol) {
            ecplx[k] = alpha;
            for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
            continue;
        }
        // reflector with real beta: H z = beta e1 for H = I - tau v v^H needs
        // tau = (beta - conj(alpha)) / beta
        const double anorm = std::sqrt(std::norm(alpha) + xnorm2);
        const double beta = (alpha.real() >= 0.0) ? -anorm : anorm;
        const cplx tau = cplx((beta - alpha.real()) / beta, alpha.imag() / beta);
        const cplx denom = alpha - beta;

        const std::size_t len = n - (k + 1);
        v.assign(n, cplx(0.0, 0.0));
        v[k + 1] = 1.0;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k) / denom;

        // p = conj(tau) * A22 * v over the trailing block
        for (std::size_t i = k + 1; i < n; ++i) {
            cplx acc(0.0, 0.0);
            for (std::size_t j = k + 1; j < n; ++j) acc += a(i, j) * v[j];
            p[i] = std::conj(tau) * acc;
        }
        // w = p - (tau/2)(v^H p) v, so that A - v w^H - w v^H realizes H A H^H
        cplx vhp(0.0, 0.0);
        for (std::size_t i = k + 1; i < n; ++i) vhp += std::conj(v[i]) * p[i];
        const cplx corr = 0.5 * tau * vhp;
        for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - corr * v[i];

        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);

        ecplx[k] = beta;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
        a(k + 1, k) = beta;
        a(k, k + 1) = beta;

        if (accumulate) {
            reflectors.emplace_back(v.begin() + (k + 1), v.begin() + (k + 1) + len);
            taus.push_back(tau);
            refl_col.push_back(k + 1);
        }
    }
    if (n >= 2) ecplx[n - 2] = a(n - 1, n - 2);

    TridiagForm t;
    t.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.d[i] = a(i, i).real();
    t.e.resize(n > 0 ? n - 1 : 0);

    // Phase pass: D^H T D real with D = diag(phi)
    std::vector<cplx> phi(n, cplx(1.0, 0.0));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double mag = std::abs(ecplx[k]);
        if (mag > 0.0)
            phi[k + 1] = phi[k] * (ecplx[k] / mag);
        else
            phi[k + 1] = phi[k];
        t.e[k] = mag;
    }

    if (accumulate) {
        // z = U^H = H_0^H H_1^H ... ; build by applying reflectors backwards.
        CMatrix z = CMatrix::identity(n);
        for (std::size_t r = reflectors.size(); r-- > 0;) {
            const auto& vr = reflectors[r];
            const cplx tau = taus[r];
            const std::size_t off = refl_col[r];
            const std::size_t len = vr.size();
            // z := (I - conj(tau) v v^H) z, v supported on rows off..off+len-1
            for (std::size_t col = 0; col < n; ++col) {
                cplx acc(0.0, 0.0);
                for (std::size_t i = 0; i < len; ++i) acc += std::conj(vr[i]) * z(off + i, col);
                acc *= std::conj(tau);
                for (std::size_t i = 0; i < len; ++i) z(off + i, col) -= vr[i] * acc;
            }
        }
        // fold phases: scale column j of z by phi[j]?  z maps tridiag-basis to
        // original: eigvec = z_phased * (QL vectors); T_real = D^H T D means
        // original vectors pick up z * D.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) z(i, j) *= phi[j];
        t.z = std::move(z);
    }
    return t;
}

// --- implicit-shift QL on real symmetric tridiagonal ----------------------

void ql_implicit(std::vector<double>& d, std::vector<double>& e, CMatrix* z,
                 std::size_t iter_cap) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    std::vector<double> ework(e);
    ework.push_back(0.0);
    std::size_t total_iter = 0;

    for (std::size_t l = 0; l < n; ++l) {
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(ework[m]) <= kEps * dd) break;
            }
            if (m == l) break;
            if (++total_iter > iter_cap)
                throw NoConvergence("hermitian_eig: QL iteration cap exceeded");

            double g = (d[l + 1] - d[l]) / (2.0 * ework[l]);
            double r = safe_hypot(g, 1.0);
            g = d[m] - d[l] + ework[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * ework[i];
                const double b = c * ework[i];
                r = safe_hypot(f, g);
                ework[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    ework[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if (z) {
                    for (std::size_t k = 0; k < z->rows(); ++k) {
                        const cplx f2 = (*z)(k, i + 1);
                        (*z)(k, i + 1) = s * (*z)(k, i) + c * f2;
                        (*z)(k, i) = c * (*z)(k, i) - s * f2;
                    }
                }
            }
            if (underflow) continue;
            d[l] -= p;
            ework[l] = g;
            ework[m] = 0.0;
        }
    }
}

void check_hermitian(const CMatrix& m, const char* who) {
    if (!m.is_square()) throw NotHermitian(std::string(who) + ": matrix not square");
    if (!m.is_hermitian(1e-12)) throw NotHermitian(std::string(who) + ": hermitian_tol violated");
}

std::vector<std::size_t> ascending_order(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& m) {
    check_hermitian(m, "hermitian_eig");
    const std::size_t n = m.rows();
    TridiagForm t = tridiagonalize(m, true);
    ql_implicit(t.d, t.e, &t.z, 30 * std::max<std::size_t>(n, 1));

    const auto order = ascending_order(t.d);
    HermitianEig out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = t.d[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = t.z(i, order[j]);
    }
    return out;
}

std::vector<double> hermitian_eigvals(const CMatrix& m) {
    check_hermitian(m, "hermitian_eigvals");
    TridiagForm t = tridiagonalize(m, false);
    ql_implicit(t.d, t.e, nullptr, 30 * std::max<std::size_t>(m.rows(), 1));
    std::sort(t.d.begin(), t.d.end());
    return t.d;
}

std::pair<double, double> hermitian_extremes(const CMatrix& m) {
    TridiagForm t = tridiagonalize(m, false);
    RealSymTridiag tri{std::move(t.d), std::move(t.e)};
    return {tridiag_lambda_min(tri), tridiag_lambda_max(tri)};
}

std::pair<double, std::vector<cplx>> hermitian_top_eigpair(const CMatrix& m) {
    check_hermitian(m, "hermitian_top_eigpair");
    const std::size_t n = m.rows();
    TridiagForm t = tridiagonalize(m, false);
    RealSymTridiag tri{std::move(t.d), std::move(t.e)};
    const double lmax = tridiag_lambda_max(tri);

    const double shift = lmax + std::max(1.0, std::abs(lmax)) * 1e-10;
    CMatrix shifted = m;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= shift;
    LuFactors f = lu_factor(std::move(shifted));

    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = cplx(1.0 + 0.3 * double(i % 7), 0.1 * double(i % 5));
    normalize(x);
    for (int it = 0; it < 4; ++it) {
        lu_solve_inplace(f, x);
        normalize(x);
    }
    const double val = rayleigh(m, x).real();
    return {val, std::move(x)};
}

// --- general complex eigenvalues -------------------------------------------

namespace {

void balance(CMatrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    bool done = false;
    int guard = 0;
    while (!done && guard++ < 50) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0;
            const double s = c + r;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void hessenberg_reduce(CMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) xnorm2 += std::norm(a(i, k));
        if (xnorm2 == 0.0) continue;
        const cplx alpha = a(k + 1, k);
        const double anorm = std::sqrt(std::norm(alpha) + xnorm2);
        const double beta = (alpha.real() >= 0.0) ? -anorm : anorm;
        const cplx tau = cplx((beta - alpha.real()) / beta, alpha.imag() / beta);
        const cplx denom = alpha - beta;
        v[k + 1] = 1.0;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k) / denom;

        // A := (I - tau v v^H) A
        for (std::size_t j = k; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t i = k + 1; i < n; ++i) acc += std::conj(v[i]) * a(i, j);
            acc *= tau;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * acc;
        }
        // A := A (I - tau v v^H)^H = A (I - conj(tau) v v^H)
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc(0.0, 0.0);
            for (std::size_t j = k + 1; j < n; ++j) acc += a(i, j) * v[j];
            acc *= std::conj(tau);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= acc * std::conj(v[j]);
        }
        a(k + 1, k) = beta;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

std::pair<cplx, cplx> eig2x2(cplx a, cplx b, cplx c, cplx d) {
    // ((a-d)/2)^2 + bc avoids the cancellation in tr^2 - 4 det for clustered
    // pairs
    const cplx mid = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    return {mid + disc, mid - disc};
}

}  // namespace

std::vector<cplx> general_eig(const CMatrix& m_in) {
    if (!m_in.is_square()) throw std::invalid_argument("general_eig: matrix not square");
    const std::size_t n = m_in.rows();
    std::vector<cplx> eig(n);
    if (n == 0) return eig;
    if (n == 1) {
        eig[0] = m_in(0, 0);
        return eig;
    }

    CMatrix h = m_in;
    balance(h);
    hessenberg_reduce(h);

    const double hnorm = std::max(h.max_abs(), 1e-300);
    std::vector<double> gc(n), gs_re(n), gs_im(n);  // Givens storage per sweep

    std::size_t hi = n - 1;
    int iter_this = 0;
    const int per_eig_cap = 60;
    while (true) {
        // deflate
        while (hi > 0) {
            const double sub = std::abs(h(hi, hi - 1));
            const double diag = std::abs(h(hi - 1, hi - 1)) + std::abs(h(hi, hi));
            if (sub <= kEps * (diag > 0.0 ? diag : hnorm)) {
                h(hi, hi - 1) = 0.0;
                eig[hi] = h(hi, hi);
                --hi;
                iter_this = 0;
            } else {
                break;
            }
        }
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }

        // active window [lo, hi]
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            const double diag = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
            if (sub <= kEps * (diag > 0.0 ? diag : hnorm)) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) continue;  // next deflation pass handles it

        if (hi - lo == 1) {
            const auto [l1, l2] =
                eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
            eig[lo] = l1;
            eig[hi] = l2;
            if (hi >= 2) {
                hi -= 2;
                iter_this = 0;
                continue;
            }
            break;
        }

        if (++iter_this > per_eig_cap)
            throw NoConvergence("general_eig: shifted-QR iteration cap exceeded");

        // Wilkinson shift from trailing 2x2 (exceptional shift every 12 iters)
        cplx shift;
        if (iter_this % 12 == 0) {
            shift = h(hi, hi) +
                    cplx(1.5 * (std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2))), 0.0);
        } else {
            const auto [l1, l2] =
                eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
            shift = (std::abs(l1 - h(hi, hi)) < std::abs(l2 - h(hi, hi))) ? l1 : l2;
        }

        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= shift;

        // QR by Givens on rows, then RQ on columns
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx x = h(k, k);
            const cplx y = h(k + 1, k);
            const double ax = std::abs(x), ay = std::abs(y);
            double c;
            cplx s;
            if (ay == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (ax == 0.0) {
                c = 0.0;
                s = 1.0;
            } else {
                const double r = safe_hypot(ax, ay);
                c = ax / r;
                s = (x / ax) * std::conj(y) / r;
            }
            gc[k] = c;
            gs_re[k] = s.real();
            gs_im[k] = s.imag();
            if (c != 1.0 || s != cplx(0.0)) {
                cplx* rk = h.row(k);
                cplx* rk1 = h.row(k + 1);
                for (std::size_t j = k; j <= hi; ++j) {
                    const cplx u = rk[j], w = rk1[j];
                    rk[j] = c * u + s * w;
                    rk1[j] = -std::conj(s) * u + c * w;
                }
            }
        }
        for (std::size_t k = lo; k < hi; ++k) {
            const double c = gc[k];
            const cplx s(gs_re[k], gs_im[k]);
            if (c == 1.0 && s == cplx(0.0)) continue;
            const std::size_t top = lo;
            const std::size_t bot = std::min(k + 1, hi);
            for (std::size_t i = top; i <= bot; ++i) {
                cplx* ri = h.row(i);
                const cplx u = ri[k], w = ri[k + 1];
                ri[k] = c * u + std::conj(s) * w;
                ri[k + 1] = -s * u + c * w;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += shift;
    }
    return eig;
}

std::vector<cplx> generalized_eig(const CMatrix& a, const CMatrix& b) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows())
        throw std::invalid_argument("generalized_eig: size mismatch");
    const double c = cond2(b);
    if (!(c <= 1e10)) throw SingularB("generalized_eig: cond(B) > 1e10");
    LuFactors f = lu_factor(b);
    CMatrix x = lu_solve_matrix(f, a);
    return general_eig(x);
}

// --- LU ---------------------------------------------------------------------

LuFactors lu_factor(CMatrix m) {
    assert(m.is_square());
    const std::size_t n = m.rows();
    LuFactors f;
    f.piv.resize(n);
    f.sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        f.piv[k] = int(p);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            f.sign = -f.sign;
        }
        if (m(k, k) == cplx(0.0, 0.0)) {
            f.singular = true;
            m(k, k) = cplx(1e-300, 0.0);
        }
        const cplx inv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx mult = m(i, k) * inv;
            m(i, k) = mult;
            if (mult == cplx(0.0, 0.0)) continue;
            const cplx* rk = m.row(k);
            cplx* ri = m.row(i);
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= mult * rk[j];
        }
    }
    f.lu = std::move(m);
    return f;
}

void lu_solve_inplace(const LuFactors& f, std::vector<cplx>& rhs) {
    const std::size_t n = f.lu.rows();
    assert(rhs.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t p = std::size_t(f.piv[k]);
        if (p != k) std::swap(rhs[k], rhs[p]);
        const cplx xk = rhs[k];
        if (xk == cplx(0.0, 0.0)) continue;
        for (std::size_t i = k + 1; i < n; ++i) rhs[i] -= f.lu(i, k) * xk;
    }
    for (std::size_t i = n; i-- > 0;) {
        cplx acc = rhs[i];
        const cplx* ri = f.lu.row(i);
        for (std::size_t j = i + 1; j < n; ++j) acc -= ri[j] * rhs[j];
        rhs[i] = acc / ri[i];
    }
}

CMatrix lu_solve_matrix(const LuFactors& f, const CMatrix& rhs) {
    const std::size_t n = f.lu.rows();
    CMatrix out(n, rhs.cols());
    std::vector<cplx> col(n);
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = rhs(i, j);
        lu_solve_inplace(f, col);
        for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
    }
    return out;
}

cplx lu_determinant(const LuFactors& f) {
    cplx det(double(f.sign), 0.0);
    for (std::size_t i = 0; i < f.lu.rows(); ++i) det *= f.lu(i, i);
    return det;
}

namespace {

// Block-2 inverse power iteration on (M^H M)^{-1}.  A single deterministic
// start vector can sit (near-)orthogonal to the minimal singular direction
// and stall on the wrong value; a two-dimensional subspace with
// matrix-hashed pseudo-random starts is robust to that and to clustered
// smallest singular values.  `solve` applies (M^H M)^{-1}; `apply` applies M.
double smallest_singular_block2(
    std::size_t n, std::uint64_t seed,
    const std::function<void(std::vector<cplx>&)>& solve,
    const std::function<std::vector<cplx>(const std::vector<cplx>&)>& apply) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<cplx> x1(n), x2(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = cplx(nd(gen), nd(gen));
        x2[i] = cplx(nd(gen), nd(gen));
    }
    auto orthonormalize = [&]() {
        normalize(x1);
        const cplx proj = inner(x2, x1);
        for (std::size_t i = 0; i < n; ++i) x2[i] -= proj * x1[i];
        normalize(x2);
    };
    orthonormalize();

    double prev = std::numeric_limits<double>::infinity();
    double value = prev;
    for (int it = 0; it < 300; ++it) {
        solve(x1);
        solve(x2);
        double n1 = norm2(x1), n2 = norm2(x2);
        if (!std::isfinite(n1) || !std::isfinite(n2) || n1 == 0.0 || n2 == 0.0) return 0.0;
        orthonormalize();
        // smallest attainable ||M z|| over the current 2D span
        const auto m1 = apply(x1);
        const auto m2 = apply(x2);
        const double g11 = inner(m1, m1).real();
        const double g22 = inner(m2, m2).real();
        const cplx g12 = inner(m1, m2);
        const double tr = g11 + g22;
        const double det = g11 * g22 - std::norm(g12);
        const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
        value = std::sqrt(std::max(0.5 * tr - disc, 0.0));
        if (it > 5 && std::abs(value - prev) <= 1e-12 * std::max(value, 1e-300)) break;
        prev = value;
    }
    return value;
}

std::uint64_t matrix_seed(const CMatrix& m) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull + m.rows();
    const std::size_t stride = std::max<std::size_t>(1, m.rows() * m.cols() / 16);
    for (std::size_t k = 0; k < m.rows() * m.cols(); k += stride) {
        const cplx v = m.data()[k];
        h ^= std::hash<double>{}(v.real()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= std::hash<double>{}(v.imag()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace

double smallest_singular(const CMatrix& m) {
    // Block inverse iteration via LU solves of M and M^H; forming the Gram
    // matrix would floor the result at sqrt(eps)*||M||.
    const std::size_t n = m.rows();
    if (n == 0) return 0.0;
    LuFactors f = lu_factor(m);
    if (f.singular) return 0.0;
    LuFactors fh = lu_factor(m.adjoint());
    if (fh.singular) return 0.0;
    return smallest_singular_block2(
        n, matrix_seed(m),
        [&](std::vector<cplx>& v) {
            lu_solve_inplace(fh, v);
            lu_solve_inplace(f, v);
        },
        [&](const std::vector<cplx>& v) { return m * v; });
}

double cond2(const CMatrix& m) {
    const CMatrix mm = m.adjoint() * m;
    auto [lmin, lmax] = hermitian_extremes(mm);
    (void)lmin;
    const double smin = smallest_singular(m);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(lmax, 0.0)) / smin;
}

CMatrix polar_multiplier(const CMatrix& t, cplx lambda) {
    assert(t.is_square());
    const std::size_t n = t.rows();
    CMatrix m = t;
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= lambda;

    const CMatrix mm = m.adjoint() * m;
    HermitianEig eg = hermitian_eig(mm);
    double smax = 0.0;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sqrt(std::max(eg.values[i], 0.0));
        smax = std::max(smax, s[i]);
    }
    const double drop = smax * 1e-13 + 1e-300;

    // W column i = M v_i / s_i (zero when s_i ~ 0); B = U^H = V W^H
    CMatrix w(n, n);
    std::vector<cplx> vi(n), mv(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] <= drop) continue;
        for (std::size_t r = 0; r < n; ++r) vi[r] = eg.vectors(r, i);
        mv = m * vi;
        for (std::size_t r = 0; r < n; ++r) w(r, i) = mv[r] / s[i];
    }
    return eg.vectors * w.adjoint();
}

CMatrix hpd_invsqrt(const CMatrix& b) {
    check_hermitian(b, "hpd_invsqrt");
    HermitianEig eg = hermitian_eig(b);
    if (eg.values.empty() || eg.values.front() < 1e-12)
        throw NotPositive("hpd_invsqrt: min eigenvalue below 1e-12");
    const std::size_t n = b.rows();
    CMatrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = 1.0 / std::sqrt(eg.values[i]);
        for (std::size_t r = 0; r < n; ++r) scaled(r, i) = eg.vectors(r, i) * f;
    }
    return scaled * eg.vectors.adjoint();
}

// --- banded -----------------------------------------------------------------

BandMatrix BandMatrix::from_dense(const CMatrix& m, std::size_t kl, std::size_t ku) {
    BandMatrix b(m.rows(), kl, ku);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const std::size_t j0 = (i >= kl) ? i - kl : 0;
        const std::size_t j1 = std::min(m.cols() - 1, i + ku);
        for (std::size_t j = j0; j <= j1; ++j) b.set(i, j, m(i, j));
    }
    return b;
}

std::vector<cplx> BandMatrix::multiply(const std::vector<cplx>& x) const {
    std::vector<cplx> y(n_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = (i >= kl_) ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        cplx acc(0.0, 0.0);
        for (std::size_t j = j0; j <= j1; ++j) acc += get(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

BandMatrix BandMatrix::adjoint() const {
    BandMatrix b(n_, ku_, kl_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = (i >= kl_) ? i - kl_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + ku_);
        for (std::size_t j = j0; j <= j1; ++j) b.set(j, i, std::conj(get(i, j)));
    }
    return b;
}

namespace {

struct BandWork {
    std::size_t n, kl, ku, width;
    std::vector<cplx>* a;
    cplx get(std::size_t i, std::size_t j) const {
        const std::ptrdiff_t off = std::ptrdiff_t(j) - std::ptrdiff_t(i) + std::ptrdiff_t(kl);
        if (off < 0 || off >= std::ptrdiff_t(width)) return cplx(0.0, 0.0);
        return (*a)[i * width + std::size_t(off)];
    }
    void set(std::size_t i, std::size_t j, cplx v) {
        const std::ptrdiff_t off = std::ptrdiff_t(j) - std::ptrdiff_t(i) + std::ptrdiff_t(kl);
        assert(off >= 0 && off < std::ptrdiff_t(width));
        (*a)[i * width + std::size_t(off)] = v;
    }
};

}  // namespace

BandLu band_lu_factor(const BandMatrix& m) {
    BandLu f;
    f.n = m.size();
    f.kl = m.lower();
    f.ku = m.upper() + m.lower();  // fill widens the upper band by kl
    const std::size_t width = f.kl + f.ku + 1;
    f.a.assign(f.n * width, cplx(0.0, 0.0));
    f.piv.resize(f.n);
    BandWork w{f.n, f.kl, f.ku, width, &f.a};
    for (std::size_t i = 0; i < f.n; ++i) {
        const std::size_t j0 = (i >= m.lower()) ? i - m.lower() : 0;
        const std::size_t j1 = std::min(f.n - 1, i + m.upper());
        for (std::size_t j = j0; j <= j1; ++j) w.set(i, j, m.get(i, j));
    }

    for (std::size_t k = 0; k < f.n; ++k) {
        const std::size_t rmax = std::min(f.n - 1, k + f.kl);
        std::size_t p = k;
        double best = std::abs(w.get(k, k));
        for (std::size_t r = k + 1; r <= rmax; ++r) {
            const double v = std::abs(w.get(r, k));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        f.piv[k] = int(p);
        const std::size_t jmax = std::min(f.n - 1, k + f.ku);
        if (p != k) {
            for (std::size_t j = k; j <= jmax; ++j) {
                const cplx tmp = w.get(k, j);
                w.set(k, j, w.get(p, j));
                w.set(p, j, tmp);
            }
        }
        cplx pivot = w.get(k, k);
        if (pivot == cplx(0.0, 0.0)) {
            f.singular = true;
            pivot = cplx(1e-300, 0.0);
            w.set(k, k, pivot);
        }
        const cplx inv = 1.0 / pivot;
        for (std::size_t r = k + 1; r <= rmax; ++r) {
            const cplx mult = w.get(r, k) * inv;
            w.set(r, k, mult);
            if (mult == cplx(0.0, 0.0)) continue;
            for (std::size_t j = k + 1; j <= jmax; ++j)
                w.set(r, j, w.get(r, j) - mult * w.get(k, j));
        }
    }
    return f;
}

namespace {

inline cplx band_at(const BandLu& f, std::size_t i, std::size_t j) {
    const std::size_t width = f.kl + f.ku + 1;
    const std::ptrdiff_t off = std::ptrdiff_t(j) - std::ptrdiff_t(i) + std::ptrdiff_t(f.kl);
    if (off < 0 || off >= std::ptrdiff_t(width)) return cplx(0.0, 0.0);
    return f.a[i * width + std::size_t(off)];
}

}  // namespace

void band_lu_solve(const BandLu& f, std::vector<cplx>& rhs) {
    for (std::size_t k = 0; k < f.n; ++k) {
        const std::size_t p = std::size_t(f.piv[k]);
        if (p != k) std::swap(rhs[k], rhs[p]);
        const cplx xk = rhs[k];
        if (xk == cplx(0.0, 0.0)) continue;
        const std::size_t rmax = std::min(f.n - 1, k + f.kl);
        for (std::size_t r = k + 1; r <= rmax; ++r) rhs[r] -= band_at(f, r, k) * xk;
    }
    for (std::size_t i = f.n; i-- > 0;) {
        cplx acc = rhs[i];
        const std::size_t jmax = std::min(f.n - 1, i + f.ku);
        for (std::size_t j = i + 1; j <= jmax; ++j) acc -= band_at(f, i, j) * rhs[j];
        rhs[i] = acc / band_at(f, i, i);
    }
}

double smallest_singular_banded(const BandMatrix& m, int max_iter, double rel_tol) {
    (void)max_iter;
    (void)rel_tol;
    const std::size_t n = m.size();
    BandLu f = band_lu_factor(m);
    if (f.singular) return 0.0;
    BandLu fh = band_lu_factor(m.adjoint());

    std::uint64_t seed = 0x9e3779b97f4a7c15ull + n;
    for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 16)) {
        const cplx v = m.get(i, i);
        seed ^= std::hash<double>{}(v.real()) + (seed << 6) + (seed >> 2);
        seed ^= std::hash<double>{}(v.imag()) + (seed << 6) + (seed >> 2);
    }
    return smallest_singular_block2(
        n, seed,
        [&](std::vector<cplx>& v) {
            band_lu_solve(fh, v);
            band_lu_solve(f, v);
        },
        [&](const std::vector<cplx>& v) { return m.multiply(v); });
}

// --- real symmetric tridiagonal ----------------------------------------------

int sturm_count_below(const RealSymTridiag& t, double x) {
    const std::size_t n = t.diag.size();
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double off2 = (i > 0) ? t.off[i - 1] * t.off[i - 1] : 0.0;
        q = (t.diag[i] - x) - (i > 0 ? off2 / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

namespace {

std::pair<double, double> gershgorin(const RealSymTridiag& t) {
    const std::size_t n = t.diag.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(t.off[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    if (n == 0) return {0.0, 0.0};
    return {lo, hi};
}

double bisect_kth_width(const RealSymTridiag& t, int k, double width_tol) {
    // smallest x with count_below(x) >= k+1 locates eigenvalue k (0-based)
    auto [lo, hi] = gershgorin(t);
    const double span = std::max(hi - lo, 1e-300);
    const double tol = std::max(width_tol, kEps * span);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // no FP progress possible
        if (sturm_count_below(t, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double bisect_kth(const RealSymTridiag& t, int k, double tol_rel) {
    auto [lo, hi] = gershgorin(t);
    const double width = std::max(tol_rel * std::max(std::abs(lo), std::abs(hi)), 1e-300);
    return bisect_kth_width(t, k, width);
}

}  // namespace

double tridiag_lambda_max(const RealSymTridiag& t, double tol_rel) {
    return bisect_kth(t, int(t.diag.size()) - 1, tol_rel);
}

double tridiag_lambda_min(const RealSymTridiag& t, double tol_rel) {
    return bisect_kth(t, 0, tol_rel);
}

double tridiag_lambda_max_abs(const RealSymTridiag& t, double abs_tol) {
    return bisect_kth_width(t, int(t.diag.size()) - 1, abs_tol);
}

double tridiag_lambda_min_abs(const RealSymTridiag& t, double abs_tol) {
    return bisect_kth_width(t, 0, abs_tol);
}

std::vector<double> tridiag_eigvals(const RealSymTridiag& t) {
    std::vector<double> d = t.diag;
    std::vector<double> e = t.off;
    ql_implicit(d, e, nullptr, 30 * std::max<std::size_t>(d.size(), 1));
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace pencilrange
