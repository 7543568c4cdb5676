#include "pencilrange/ranges.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <random>

#include "pencilrange/gallery.hpp"
#include "pencilrange/matkernel.hpp"

namespace pencilrange {

CMatrix subblock(const CMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
                 std::size_t c1) {
    CMatrix out(r1 - r0, c1 - c0);
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = c0; j < c1; ++j) out(i - r0, j - c0) = m(i, j);
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Structured evaluator for the extreme eigenvalues of
//   H_theta(lambda) = Re_H(e^{-i theta} (A - lambda B))
// over a direct sum of pencil blocks.  Diagonal pairs cost O(n) per
// evaluation, real-symmetric-tridiagonal A with real-diagonal B cost
// O(n log), anything else goes through the dense Hermitian kernel.
// ---------------------------------------------------------------------------

struct DiagBlock {
    std::vector<cplx> a, b;
};

struct TriBlock {
    std::vector<double> adiag, aoff, bdiag;
};

struct DenseBlock {
    CMatrix h1a, h2a, h1b, h2b;
    std::size_t n = 0;
};

// exact distance from the origin to the convex hull of a point set; the
// degenerate (collinear) hulls that diagonal real pencils produce are handled
double dist_origin_to_hull(std::vector<cplx>& pts) {
    const std::size_t n = pts.size();
    if (n == 0) return std::numeric_limits<double>::infinity();
    if (n == 1) return std::abs(pts[0]);
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    auto cross = [](cplx o, cplx a, cplx b) {
        return (a.real() - o.real()) * (b.imag() - o.imag()) -
               (a.imag() - o.imag()) * (b.real() - o.real());
    };
    std::vector<cplx> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);  // last point repeats the first

    auto seg_dist = [](cplx a, cplx b) {
        const cplx ab = b - a;
        const double len2 = std::norm(ab);
        if (len2 == 0.0) return std::abs(a);
        const double t = -(a.real() * ab.real() + a.imag() * ab.imag()) / len2;
        if (t <= 0.0) return std::abs(a);
        if (t >= 1.0) return std::abs(b);
        // cross-product form: no cancellation when the segment passes near 0
        return std::abs(a.real() * ab.imag() - a.imag() * ab.real()) / std::sqrt(len2);
    };
    if (hull.size() == 1) return std::abs(hull[0]);
    if (hull.size() == 2) return seg_dist(hull[0], hull[1]);
    // inside test for a convex polygon in ccw order
    bool inside = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const cplx a = hull[i], b = hull[(i + 1) % hull.size()];
        if (cross(a, b, cplx(0, 0)) < 0.0) {
            inside = false;
            break;
        }
    }
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i)
        best = std::min(best, seg_dist(hull[i], hull[(i + 1) % hull.size()]));
    return best;
}

// Allocation-free Hermitian extremes for small dense blocks (n <= 24):
// in-place Householder tridiagonalization on a stack buffer followed by
// Sturm bisection.  The hot path of dense pencil rasters.
constexpr std::size_t kSmallN = 24;

std::pair<double, double> small_hermitian_extremes(cplx* a, std::size_t n, double abs_tol) {
    double d[kSmallN], e[kSmallN];
    cplx v[kSmallN], p[kSmallN];
    auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };

    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) xnorm2 += std::norm(at(i, k));
        const cplx alpha = at(k + 1, k);
        if (xnorm2 <= 1e-300) {
            e[k] = std::abs(alpha);
            continue;
        }
        const double anorm = std::sqrt(std::norm(alpha) + xnorm2);
        const double beta = (alpha.real() >= 0.0) ? -anorm : anorm;
        const cplx tau = cplx((beta - alpha.real()) / beta, alpha.imag() / beta);
        const cplx denom = alpha - beta;
        v[k + 1] = 1.0;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = at(i, k) / denom;
        for (std::size_t i = k + 1; i < n; ++i) {
            cplx acc(0, 0);
            for (std::size_t j = k + 1; j < n; ++j) acc += at(i, j) * v[j];
            p[i] = std::conj(tau) * acc;
        }
        cplx vhp(0, 0);
        for (std::size_t i = k + 1; i < n; ++i) vhp += std::conj(v[i]) * p[i];
        const cplx corr = 0.5 * tau * vhp;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx w = p[i] - corr * v[i];
            for (std::size_t j = k + 1; j < n; ++j)
                at(i, j) -= v[i] * std::conj(p[j] - corr * v[j]) + w * std::conj(v[j]);
        }
        e[k] = std::abs(beta);
    }
    if (n >= 2) e[n - 2] = std::abs(at(n - 1, n - 2));
    for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i).real();
    if (n == 1) return {d[0], d[0]};

    // Gershgorin bracket
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    auto count_below = [&](double x) {
        int count = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double off2 = (i > 0) ? e[i - 1] * e[i - 1] : 0.0;
            q = (d[i] - x) - (i > 0 ? off2 / q : 0.0);
            if (q == 0.0) q = -1e-300;
            if (q < 0.0) ++count;
        }
        return count;
    };
    const double span = std::max(hi - lo, 1e-300);
    const double tol = std::max(abs_tol, 4.0 * std::numeric_limits<double>::epsilon() * span);
    auto bisect = [&](int k_target) {
        double a0 = lo, b0 = hi;
        while (b0 - a0 > tol) {
            const double mid = 0.5 * (a0 + b0);
            if (mid <= a0 || mid >= b0) break;
            if (count_below(mid) >= k_target + 1)
                b0 = mid;
            else
                a0 = mid;
        }
        return 0.5 * (a0 + b0);
    };
    return {bisect(0), bisect(int(n) - 1)};
}

class PencilEvaluator {
public:
    explicit PencilEvaluator(const std::vector<const PencilSection*>& blocks) {
        for (const PencilSection* p : blocks) add_block(*p);
    }

    /// Pure diagonal pencils admit the exact membership distance
    /// dist(0, conv{a_j - lambda b_j}) with no angle grid.
    bool diag_only() const { return tri_.empty() && dense_.empty(); }

    /// Absolute accuracy used for the tridiagonal extreme-eigenvalue
    /// bisections; callers comparing against a coarse threshold set this to
    /// a fraction of that threshold.
    void set_extreme_tol(double tol) { extreme_tol_ = tol; }

    double diag_distance(cplx lambda) const {
        std::vector<cplx>& pts = scratch_;
        pts.clear();
        for (const auto& d : diag_)
            for (std::size_t j = 0; j < d.a.size(); ++j)
                pts.push_back(d.a[j] - lambda * d.b[j]);
        return dist_origin_to_hull(pts);
    }

    std::pair<double, double> extremes(double c, double s, cplx lambda) const {
        double lmin = std::numeric_limits<double>::infinity();
        double lmax = -lmin;
        // Re(e^{-i theta} z) = Re(z) c + Im(z) s
        const double rlam = lambda.real() * c + lambda.imag() * s;
        const double ilam = lambda.imag() * c - lambda.real() * s;
        for (const auto& d : diag_) {
            for (std::size_t j = 0; j < d.a.size(); ++j) {
                const cplx m = d.a[j] - lambda * d.b[j];
                const double v = m.real() * c + m.imag() * s;
                lmin = std::min(lmin, v);
                lmax = std::max(lmax, v);
            }
        }
        for (const auto& t : tri_) {
            RealSymTridiag h;
            h.diag.resize(t.adiag.size());
            for (std::size_t j = 0; j < t.adiag.size(); ++j)
                h.diag[j] = c * t.adiag[j] - rlam * t.bdiag[j];
            h.off.resize(t.aoff.size());
            for (std::size_t j = 0; j < t.aoff.size(); ++j) h.off[j] = c * t.aoff[j];
            if (extreme_tol_ > 0.0) {
                lmin = std::min(lmin, tridiag_lambda_min_abs(h, extreme_tol_));
                lmax = std::max(lmax, tridiag_lambda_max_abs(h, extreme_tol_));
            } else {
                lmin = std::min(lmin, tridiag_lambda_min(h, 1e-12));
                lmax = std::max(lmax, tridiag_lambda_max(h, 1e-12));
            }
        }
        for (const auto& db : dense_) {
            if (db.n <= kSmallN) {
                cplx h[kSmallN * kSmallN];
                for (std::size_t i = 0; i < db.n; ++i)
                    for (std::size_t j = 0; j < db.n; ++j)
                        h[i * db.n + j] = c * db.h1a(i, j) + s * db.h2a(i, j) -
                                          rlam * db.h1b(i, j) + ilam * db.h2b(i, j);
                auto [blmin, blmax] = small_hermitian_extremes(h, db.n, extreme_tol_);
                lmin = std::min(lmin, blmin);
                lmax = std::max(lmax, blmax);
                continue;
            }
            CMatrix h(db.n, db.n);
            for (std::size_t i = 0; i < db.n; ++i)
                for (std::size_t j = 0; j < db.n; ++j)
                    h(i, j) = c * db.h1a(i, j) + s * db.h2a(i, j) - rlam * db.h1b(i, j) +
                              ilam * db.h2b(i, j);
            auto [blmin, blmax] = hermitian_extremes(h);
            lmin = std::min(lmin, blmin);
            lmax = std::max(lmax, blmax);
        }
        return {lmin, lmax};
    }

private:
    void add_block(const PencilSection& p) {
        const std::size_t n = p.A.rows();
        const double scale = std::max({p.A.max_abs(), p.B.max_abs(), 1e-300});
        const double tiny = 1e-14 * scale;

        if (p.A.is_diagonal_within(tiny) && p.B.is_diagonal_within(tiny)) {
            DiagBlock d;
            d.a.resize(n);
            d.b.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                d.a[i] = p.A(i, i);
                d.b[i] = p.B(i, i);
            }
            diag_.push_back(std::move(d));
            return;
        }

        bool tri_ok = p.A.offtridiagonal_max() <= tiny && p.B.is_diagonal_within(tiny);
        if (tri_ok) {
            for (std::size_t i = 0; i < n && tri_ok; ++i) {
                if (std::abs(p.A(i, i).imag()) > tiny || std::abs(p.B(i, i).imag()) > tiny)
                    tri_ok = false;
                if (i + 1 < n &&
                    (std::abs(p.A(i, i + 1).imag()) > tiny ||
                     std::abs(p.A(i, i + 1) - p.A(i + 1, i)) > tiny))
                    tri_ok = false;
            }
        }
        if (tri_ok) {
            TriBlock t;
            t.adiag.resize(n);
            t.bdiag.resize(n);
            t.aoff.resize(n > 0 ? n - 1 : 0);
            for (std::size_t i = 0; i < n; ++i) {
                t.adiag[i] = p.A(i, i).real();
                t.bdiag[i] = p.B(i, i).real();
                if (i + 1 < n) t.aoff[i] = p.A(i, i + 1).real();
            }
            tri_.push_back(std::move(t));
            return;
        }

        DenseBlock d;
        d.n = n;
        const CMatrix ah = p.A.adjoint();
        const CMatrix bh = p.B.adjoint();
        d.h1a = CMatrix(n, n);
        d.h2a = CMatrix(n, n);
        d.h1b = CMatrix(n, n);
        d.h2b = CMatrix(n, n);
        const cplx half(0.5, 0.0), halfi(0.0, -0.5);  // 1/(2i) = -i/2
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                d.h1a(i, j) = half * (p.A(i, j) + ah(i, j));
                d.h2a(i, j) = halfi * (p.A(i, j) - ah(i, j));
                d.h1b(i, j) = half * (p.B(i, j) + bh(i, j));
                d.h2b(i, j) = halfi * (p.B(i, j) - bh(i, j));
            }
        dense_.push_back(std::move(d));
    }

    std::vector<DiagBlock> diag_;
    std::vector<TriBlock> tri_;
    std::vector<DenseBlock> dense_;
    double extreme_tol_ = 0.0;
    mutable std::vector<cplx> scratch_;
};

// ---------------------------------------------------------------------------
// Raster construction.  For each direction the excluded set
// {lambda : f(lambda) < -tol} is convex (f is a max of affine functions of
// lambda), so rows are scanned outward from the 2D minimizer with
// binary-searched interval endpoints; rows before/after the convex slab are
// skipped by contiguity.
// ---------------------------------------------------------------------------

class ConvexRowScanner {
public:
    ConvexRowScanner(const PencilEvaluator& ev, Raster& excluded, double tol)
        : ev_(ev), r_(excluded), tol_(tol) {}

    void scan_direction(double c, double s, int flag) {
        c_ = c;
        s_ = s;
        flag_ = flag;
        const long nx = long(r_.nx()), ny = long(r_.ny());

        // global minimizer via nested discrete ternary search
        auto [iy_min, ix_min, fmin] = argmin_2d();
        if (!(fmin < -tol_)) return;

        long lo, hi;
        row_interval(iy_min, ix_min, lo, hi);
        mark(iy_min, lo, hi);
        long plo = lo, phi = hi;
        for (long iy = iy_min + 1; iy < ny; ++iy) {
            if (!row_from_prev(iy, plo, phi)) break;
        }
        plo = lo;
        phi = hi;
        for (long iy = iy_min - 1; iy >= 0; --iy) {
            if (!row_from_prev(iy, plo, phi)) break;
        }
        (void)nx;
    }

private:
    double eval(long ix, long iy) const {
        const cplx lambda = r_.center(std::size_t(ix), std::size_t(iy));
        auto [lmin, lmax] = ev_.extremes(c_, s_, lambda);
        return flag_ > 0 ? lmax : -lmin;
    }

    // discrete ternary minimum of a convex sequence
    template <typename F>
    static std::pair<long, double> ternary_min(long lo, long hi, F&& f) {
        while (hi - lo > 2) {
            const long m1 = lo + (hi - lo) / 3;
            const long m2 = hi - (hi - lo) / 3;
            if (f(m1) <= f(m2))
                hi = m2;
            else
                lo = m1;
        }
        long best = lo;
        double bestv = f(lo);
        for (long i = lo + 1; i <= hi; ++i) {
            const double v = f(i);
            if (v < bestv) {
                bestv = v;
                best = i;
            }
        }
        return {best, bestv};
    }

    std::tuple<long, long, double> argmin_2d() const {
        const long nx = long(r_.nx()), ny = long(r_.ny());
        auto row_min = [&](long iy) {
            return ternary_min(0, nx - 1, [&](long ix) { return eval(ix, iy); });
        };
        const auto [iy, vy] = ternary_min(0, ny - 1, [&](long y) { return row_min(y).second; });
        (void)vy;
        const auto [ix, v] = row_min(iy);
        return {iy, ix, v};
    }

    // exact excluded interval of a row given an inside cell
    void row_interval(long iy, long inside, long& lo, long& hi) const {
        const long nx = long(r_.nx());
        long a = 0, b = inside;
        if (eval(0, iy) < -tol_) {
            lo = 0;
        } else {
            while (b - a > 1) {  // f(a) >= -tol, f(b) < -tol
                const long m = (a + b) / 2;
                if (eval(m, iy) < -tol_)
                    b = m;
                else
                    a = m;
            }
            lo = b;
        }
        a = inside;
        b = nx - 1;
        if (eval(nx - 1, iy) < -tol_) {
            hi = nx - 1;
        } else {
            while (b - a > 1) {  // f(a) < -tol, f(b) >= -tol
                const long m = (a + b) / 2;
                if (eval(m, iy) < -tol_)
                    a = m;
                else
                    b = m;
            }
            hi = a;
        }
    }

    // scan row iy using the previous row's interval as a warm start; returns
    // false when the row has no excluded cell (region ended, by convexity)
    bool row_from_prev(long iy, long& plo, long& phi) {
        const long nx = long(r_.nx());
        long probe = std::clamp((plo + phi) / 2, 0L, nx - 1);
        if (!(eval(probe, iy) < -tol_)) {
            // fall back to the row minimum (slices of a convex set may shift)
            const auto [ix, v] = ternary_min(0, nx - 1, [&](long x) { return eval(x, iy); });
            if (!(v < -tol_)) return false;
            probe = ix;
        }
        long lo, hi;
        row_interval(iy, probe, lo, hi);
        mark(iy, lo, hi);
        plo = lo;
        phi = hi;
        return true;
    }

    void mark(long iy, long lo, long hi) {
        for (long ix = lo; ix <= hi; ++ix) r_.set(std::size_t(ix), std::size_t(iy), true);
    }

    const PencilEvaluator& ev_;
    Raster& r_;
    double tol_;
    double c_ = 1.0, s_ = 0.0;
    int flag_ = 1;
};

Raster raster_from_evaluator(PencilEvaluator& ev, const Box& box, std::size_t nx,
                             std::size_t ny, std::size_t angles, double tol) {
    ev.set_extreme_tol(0.05 * tol);
    if (ev.diag_only()) {
        Raster member(box, nx, ny);
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix)
                member.set(ix, iy, ev.diag_distance(member.center(ix, iy)) <= tol);
        return member;
    }
    if (angles % 2) ++angles;
    Raster excluded(box, nx, ny);
    ConvexRowScanner scanner(ev, excluded, tol);
    for (std::size_t k = 0; k < angles / 2; ++k) {
        const double th = 2.0 * M_PI * double(k) / double(angles);
        scanner.scan_direction(std::cos(th), std::sin(th), +1);
        scanner.scan_direction(std::cos(th), std::sin(th), -1);
    }
    Raster member(box, nx, ny);
    for (std::size_t k = 0; k < member.raw().size(); ++k)
        member.raw()[k] = excluded.raw()[k] ? 0 : 1;
    return member;
}

bool member_from_evaluator(const PencilEvaluator& ev, cplx lambda, double tol,
                           std::size_t angles) {
    if (ev.diag_only()) return ev.diag_distance(lambda) <= tol;
    if (angles % 2) ++angles;
    for (std::size_t k = 0; k < angles / 2; ++k) {
        const double th = 2.0 * M_PI * double(k) / double(angles);
        auto [lmin, lmax] = ev.extremes(std::cos(th), std::sin(th), lambda);
        if (lmax < -tol || lmin > tol) return false;
    }
    return true;
}

CMatrix zero_like(const CMatrix& m) { return CMatrix(m.rows(), m.cols()); }

}  // namespace

SupportFn nrange(const CMatrix& m, std::size_t angles) {
    if (!m.is_square()) throw InvalidSpec("nrange: matrix not square");
    if (angles % 2) ++angles;
    const PencilSection p{m, zero_like(m)};
    const PencilEvaluator ev({&p});
    SupportFn s;
    s.values.assign(angles, 0.0);
    for (std::size_t k = 0; k < angles / 2; ++k) {
        const double th = 2.0 * M_PI * double(k) / double(angles);
        auto [lmin, lmax] = ev.extremes(std::cos(th), std::sin(th), cplx(0, 0));
        s.values[k] = lmax;
        s.values[k + angles / 2] = -lmin;
    }
    return s;
}

std::vector<cplx> nrange_boundary(const CMatrix& m, std::size_t angles) {
    std::vector<cplx> pts;
    pts.reserve(angles);
    const std::size_t n = m.rows();
    const CMatrix mh = m.adjoint();
    for (std::size_t k = 0; k < angles; ++k) {
        const double th = 2.0 * M_PI * double(k) / double(angles);
        const cplx w = std::polar(1.0, -th);
        CMatrix h(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                h(i, j) = 0.5 * (w * m(i, j) + std::conj(w) * mh(i, j));
        const auto [val, vec] = hermitian_top_eigpair(h);
        (void)val;
        pts.push_back(rayleigh(m, vec));
    }
    return pts;
}

bool zero_in_nrange(const CMatrix& m, double tol, std::size_t angles) {
    const PencilSection p{m, zero_like(m)};
    const PencilEvaluator ev({&p});
    return member_from_evaluator(ev, cplx(0, 0), tol, angles);
}

Raster pencil_range(const PencilSection& p, const Box& box, std::size_t nx, std::size_t ny,
                    std::size_t angles) {
    if (!p.A.is_square() || !p.B.is_square() || p.A.rows() != p.B.rows())
        throw InvalidSpec("pencil_range: size mismatch");
    Raster probe(box, nx, ny);
    PencilEvaluator ev({&p});
    return raster_from_evaluator(ev, box, nx, ny, angles, probe.cell_diag());
}

bool pencil_range_member(const PencilSection& p, cplx lambda, double tol, std::size_t angles) {
    const PencilEvaluator ev({&p});
    return member_from_evaluator(ev, lambda, tol, angles);
}

SupportFn w_range_hpd(const PencilSection& p, std::size_t angles) {
    const CMatrix s = hpd_invsqrt(p.B);
    return nrange(s * p.A * s, angles);
}

Raster ess_range_tail(const PencilFamily& f, const Box& box, std::size_t nx, std::size_t ny,
                      const std::vector<double>& tail_depths, std::size_t section_size,
                      std::size_t angles) {
    if (tail_depths.empty()) throw InvalidSpec("ess_range_tail: no tail depths");
    Raster probe(box, nx, ny);
    const double tol = probe.cell_diag();

    std::optional<Raster> acc;
    for (const double depth : tail_depths) {
        auto blocks = family_window(f, depth, section_size);
        if (!blocks)
            throw UnsupportedFamily("ess_range_tail: family without coordinate structure");

        // w_e route when every window B-section is Hermitian positive definite
        bool hpd = true;
        for (const auto& blk : *blocks) {
            if (!blk.B.is_hermitian(1e-12)) {
                hpd = false;
                break;
            }
            auto [lmin, lmax] = hermitian_extremes(blk.B);
            (void)lmax;
            if (lmin < 1e-12) {
                hpd = false;
                break;
            }
        }

        std::vector<PencilSection> transformed;
        if (hpd) {
            for (const auto& blk : *blocks) {
                const CMatrix s = hpd_invsqrt(blk.B);
                transformed.push_back({s * blk.A * s, CMatrix::identity(blk.A.rows())});
            }
        }
        const std::vector<PencilSection>& use = hpd ? transformed : *blocks;
        std::vector<const PencilSection*> ptrs;
        for (const auto& blk : use) ptrs.push_back(&blk);
        PencilEvaluator ev(ptrs);
        Raster r = raster_from_evaluator(ev, box, nx, ny, angles, tol);
        acc = acc ? raster_intersect(*acc, r) : std::move(r);
    }
    return *acc;
}

std::vector<cplx> qnr_sample(const CMatrix& t, std::size_t p, std::size_t q,
                             std::size_t samples, std::uint64_t rng_seed) {
    if (p < 1 || q < 1 || p + q != t.rows() || !t.is_square())
        throw InvalidSpec("qnr_sample: bad block sizes");
    const CMatrix a = subblock(t, 0, p, 0, p);
    const CMatrix b = subblock(t, 0, p, p, p + q);
    const CMatrix c = subblock(t, p, p + q, 0, p);
    const CMatrix d = subblock(t, p, p + q, p, p + q);

    std::mt19937_64 gen(rng_seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto unit = [&](std::size_t n) {
        std::vector<cplx> x(n);
        for (auto& v : x) v = cplx(nd(gen), nd(gen));
        normalize(x);
        return x;
    };

    std::vector<cplx> out;
    out.reserve(2 * samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto x = unit(p);
        const auto y = unit(q);
        const cplx t11 = inner(a * x, x);
        const cplx t12 = inner(b * y, x);
        const cplx t21 = inner(c * x, y);
        const cplx t22 = inner(d * y, y);
        const cplx half = 0.5 * (t11 + t22);
        const cplx disc = std::sqrt(0.25 * (t11 - t22) * (t11 - t22) + t12 * t21);
        out.push_back(half + disc);
        out.push_back(half - disc);
    }
    return out;
}

ResolventBound resolvent_bound(const PencilSection& p, cplx lambda, std::size_t angles) {
    ResolventBound out;
    CMatrix pencil = p.A;
    pencil -= lambda * p.B;
    const double smin = smallest_singular(pencil);
    out.actual = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();

    if (zero_in_nrange(p.B, 0.0, angles)) return out;
    if (pencil_range_member(p, lambda, 0.0, angles)) return out;

    const double d0 = nrange(p.B, angles).distance(cplx(0, 0));
    double dist = 0.0;
    bool hpd = p.B.is_hermitian(1e-12);
    if (hpd) {
        const auto [lmin, lmax] = hermitian_extremes(p.B);
        (void)lmax;
        hpd = lmin >= 1e-12;
    }
    if (hpd) {
        dist = w_range_hpd(p, angles).distance(lambda);
    } else {
        // raster route: W(A,B) is contained in the disk of radius
        // ||A||_2 / dist(0, W(B)) around the origin
        const auto [amin, amax] = hermitian_extremes(p.A.adjoint() * p.A);
        (void)amin;
        const double radius = std::sqrt(std::max(amax, 0.0)) / d0;
        const double reach = std::max(radius, std::abs(lambda)) * 1.1 + 1.0;
        const Box box{-reach, reach, -reach, reach};
        const Raster r = pencil_range(p, box, 400, 400, angles);
        dist = std::numeric_limits<double>::infinity();
        for (std::size_t iy = 0; iy < r.ny(); ++iy)
            for (std::size_t ix = 0; ix < r.nx(); ++ix)
                if (r.get(ix, iy)) dist = std::min(dist, std::abs(lambda - r.center(ix, iy)));
        if (!std::isfinite(dist)) return out;
    }
    if (dist <= 0.0) return out;
    out.bound = 1.0 / (d0 * dist);
    return out;
}

}  // namespace pencilrange
