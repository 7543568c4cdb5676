#include "pencilrange/gallery.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace pencilrange {

// --- EssRan ------------------------------------------------------------------

EssRan EssRan::from_points(std::vector<cplx> pts) {
    EssRan e;
    e.kind = Kind::Points;
    e.points = std::move(pts);
    return e;
}

EssRan EssRan::polygon(std::vector<cplx> vertices) {
    EssRan e;
    e.kind = Kind::Polygon;
    e.points = std::move(vertices);
    return e;
}

EssRan EssRan::circle(cplx center, double radius) {
    EssRan e;
    e.kind = Kind::Circle;
    e.center = center;
    e.radius = radius;
    return e;
}

bool EssRan::empty() const {
    return kind != Kind::Circle && points.empty();
}

namespace {

double segment_distance(cplx z, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(z - a);
    double t = ((z.real() - a.real()) * ab.real() + (z.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

bool inside_convex(cplx z, const std::vector<cplx>& v) {
    if (v.size() < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const cplx a = v[i], b = v[(i + 1) % v.size()];
        const double cross = (b.real() - a.real()) * (z.imag() - a.imag()) -
                             (b.imag() - a.imag()) * (z.real() - a.real());
        if (cross > 1e-15) {
            if (sign < 0) return false;
            sign = 1;
        } else if (cross < -1e-15) {
            if (sign > 0) return false;
            sign = -1;
        }
    }
    return true;
}

}  // namespace

double EssRan::distance(cplx z) const {
    switch (kind) {
        case Kind::Circle:
            return std::abs(std::abs(z - center) - radius);
        case Kind::Points: {
            double best = std::numeric_limits<double>::infinity();
            for (const cplx p : points) best = std::min(best, std::abs(z - p));
            return best;
        }
        case Kind::Polygon: {
            if (points.size() == 1) return std::abs(z - points.front());
            if (inside_convex(z, points)) return 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < points.size(); ++i)
                best = std::min(best,
                                segment_distance(z, points[i], points[(i + 1) % points.size()]));
            return best;
        }
    }
    return std::numeric_limits<double>::infinity();
}

std::vector<cplx> EssRan::hull_vertices() const {
    if (kind != Kind::Circle) return points;
    std::vector<cplx> v;
    for (int k = 0; k < 360; ++k) v.push_back(center + std::polar(radius, 2.0 * M_PI * k / 360.0));
    return v;
}

// --- Multiplier ----------------------------------------------------------------

Multiplier Multiplier::scalar(ScalarFn f) {
    Multiplier m;
    m.kind = Kind::Scalar;
    m.fn = std::move(f);
    return m;
}

Multiplier Multiplier::block_phase(double theta) {
    Multiplier m;
    m.kind = Kind::BlockPhase;
    m.theta = theta;
    return m;
}

Multiplier Multiplier::hl_resolvent(cplx lambda, double eps) {
    Multiplier m;
    m.kind = Kind::HlResolvent;
    m.hl_lambda = lambda;
    m.hl_eps = eps;
    return m;
}

// --- PencilFamily factories ------------------------------------------------------

bool PencilFamily::is_differential() const {
    switch (kind_) {
        case Kind::Schrodinger1d:
        case Kind::SturmLiouvilleIndefinite:
        case Kind::Dirac1d:
        case Kind::Stokes1d:
        case Kind::HainLust:
            return true;
        case Kind::Multiplied:
            return base_->is_differential();
        default:
            return false;
    }
}

cplx PencilFamily::diag_a(std::size_t n) const {
    assert(kind_ == Kind::Diagonal);
    return a_(double(n));
}

cplx PencilFamily::diag_b(std::size_t n) const {
    assert(kind_ == Kind::Diagonal);
    return b_(double(n));
}

PencilFamily PencilFamily::diagonal(ScalarFn a, ScalarFn b, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::Diagonal;
    f.a_ = std::move(a);
    f.b_ = std::move(b);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::schrodinger1d(ScalarFn v, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::Schrodinger1d;
    f.v_ = std::move(v);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::sturm_liouville(ScalarFn v, ScalarFn j, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::SturmLiouvilleIndefinite;
    f.v_ = std::move(v);
    f.b_ = std::move(j);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::dirac1d(ScalarFn v, EssRan essran_v, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::Dirac1d;
    f.v_ = std::move(v);
    f.essran_u_ = std::move(essran_v);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::stokes1d(cplx gamma, cplx delta, ScalarFn u, EssRan essran_u,
                                    std::string name) {
    PencilFamily f;
    f.kind_ = Kind::Stokes1d;
    f.gamma_ = gamma;
    f.delta_ = delta;
    f.u_ = std::move(u);
    f.essran_u_ = std::move(essran_u);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::hain_lust(ScalarFn q, ScalarFn w, ScalarFn v, ScalarFn u,
                                     EssRan essran_u, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::HainLust;
    f.q_ = std::move(q);
    f.w_ = std::move(w);
    f.v_ = std::move(v);
    f.u_ = std::move(u);
    f.essran_u_ = std::move(essran_u);
    f.name_ = std::move(name);

    // sectoriality and relative-bound fits, sampled on a probe grid
    double theta = 0.0, bfit = 0.0;
    bool sector_ok = true, relbound_ok = true;
    for (double x = -20.0; x <= 20.0; x += 0.01) {
        const cplx qv = f.q_(x);
        const cplx vv = f.v_(x);
        const double qm = std::abs(qv);
        if (qm > 1e-12) {
            theta = std::max(theta, std::abs(std::arg(qv)));
            bfit = std::max(bfit, std::norm(vv) / qm);
        } else if (std::norm(vv) > 1e-10) {
            relbound_ok = false;
        }
    }
    if (theta >= M_PI / 2.0) sector_ok = false;
    f.hl_theta_fit_ = theta;
    f.hl_b_fit_ = bfit;
    if (!sector_ok)
        f.warnings_.push_back("ConditionViolated: essential range of Q leaves the sector");
    if (!relbound_ok)
        f.warnings_.push_back("ConditionViolated: |V|^2 <= b|Q| fails where Q vanishes");
    return f;
}

PencilFamily PencilFamily::block2x2_diag(ScalarFn c11, ScalarFn c12, ScalarFn c21, ScalarFn c22,
                                         ScalarFn b11, ScalarFn b22, std::string name) {
    PencilFamily f;
    f.kind_ = Kind::Block2x2;
    f.c11_ = std::move(c11);
    f.c12_ = std::move(c12);
    f.c21_ = std::move(c21);
    f.c22_ = std::move(c22);
    f.b11_ = std::move(b11);
    f.b22_ = std::move(b22);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::literal(CMatrix a, CMatrix b, std::string name) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows())
        throw InvalidSpec("literal family: size mismatch");
    PencilFamily f;
    f.kind_ = Kind::Literal;
    f.lit_a_ = std::move(a);
    f.lit_b_ = std::move(b);
    f.name_ = std::move(name);
    return f;
}

PencilFamily PencilFamily::multiplied(PencilFamily base, Multiplier m, std::string name) {
    if (m.kind == Multiplier::Kind::HlResolvent && base.kind_ != Kind::HainLust)
        throw InvalidSpec("multiplied: resolvent multiplier requires a Hain-Lust base");
    PencilFamily f;
    f.kind_ = Kind::Multiplied;
    f.base_ = std::make_shared<PencilFamily>(std::move(base));
    f.mult_ = std::move(m);
    f.name_ = std::move(name);
    return f;
}

// --- sections -------------------------------------------------------------------

struct FamilyAccess {
    static const ScalarFn& a(const PencilFamily& f) { return f.a_; }
    static const ScalarFn& b(const PencilFamily& f) { return f.b_; }
    static const ScalarFn& v(const PencilFamily& f) { return f.v_; }
    static const ScalarFn& q(const PencilFamily& f) { return f.q_; }
    static const ScalarFn& w(const PencilFamily& f) { return f.w_; }
    static const ScalarFn& u(const PencilFamily& f) { return f.u_; }
    static cplx gamma(const PencilFamily& f) { return f.gamma_; }
    static cplx delta(const PencilFamily& f) { return f.delta_; }
};

std::vector<double> section_grid(const TruncationSpec& t) {
    const double h = 2.0 * t.half_length / double(t.n + 1);
    std::vector<double> x(t.n);
    for (std::size_t i = 0; i < t.n; ++i) x[i] = -t.half_length + double(i + 1) * h;
    return x;
}

namespace {

void check_differential_spec(const TruncationSpec& t) {
    if (t.n < 2 || t.half_length <= 0.0)
        throw InvalidSpec("differential truncation needs N >= 2 and L > 0");
}

// -d^2/dx^2 + potential, 3-point stencil, Dirichlet rows eliminated
CMatrix laplacian_plus(const std::vector<double>& x, double h, const ScalarFn& pot) {
    const std::size_t n = x.size();
    CMatrix a(n, n);
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 2.0 * inv_h2 + (pot ? pot(x[i]) : cplx(0, 0));
        if (i + 1 < n) {
            a(i, i + 1) = -inv_h2;
            a(i + 1, i) = -inv_h2;
        }
    }
    return a;
}

// centered first derivative
CMatrix first_derivative(std::size_t n, double h) {
    CMatrix d(n, n);
    const double c = 1.0 / (2.0 * h);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        d(i, i + 1) = c;
        d(i + 1, i) = -c;
    }
    return d;
}

CMatrix diag_sample(const std::vector<double>& x, const ScalarFn& f) {
    std::vector<cplx> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(x[i]);
    return CMatrix::diagonal(v);
}

CMatrix assemble_blocks(const CMatrix& a11, const CMatrix& a12, const CMatrix& a21,
                        const CMatrix& a22) {
    const std::size_t n = a11.rows();
    CMatrix t(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            t(i, j) = a11(i, j);
            t(i, j + n) = a12(i, j);
            t(i + n, j) = a21(i, j);
            t(i + n, j + n) = a22(i, j);
        }
    return t;
}

PencilSection section_on_grid(const PencilFamily& f, const std::vector<double>& x, double h);

// interior points of the two-sided tail windows used for differential kinds
std::vector<double> window_grid_left(double depth, std::size_t size, double h) {
    std::vector<double> x(size);
    for (std::size_t j = 0; j < size; ++j) x[j] = -depth - double(size - j) * h;
    return x;
}

std::vector<double> window_grid_right(double depth, std::size_t size, double h) {
    std::vector<double> x(size);
    for (std::size_t j = 0; j < size; ++j) x[j] = depth + double(j + 1) * h;
    return x;
}

// multiplier sample matched to a base section; pos carries the sample
// positions (grid nodes for differential bases, indices for diagonal/block)
CMatrix multiplier_sample(const PencilFamily& f, const std::vector<double>& pos,
                          std::size_t base_size) {
    const Multiplier& m = *f.multiplier();
    const PencilFamily& base = *f.base();
    switch (m.kind) {
        case Multiplier::Kind::Scalar: {
            std::vector<cplx> d(base_size);
            if (base_size == pos.size()) {
                for (std::size_t i = 0; i < base_size; ++i) d[i] = m.fn(pos[i]);
            } else if (base_size == 2 * pos.size()) {  // block kinds: same sample per block
                for (std::size_t i = 0; i < pos.size(); ++i) d[i] = d[i + pos.size()] = m.fn(pos[i]);
            } else {
                throw InvalidSpec("multiplied: cannot match scalar multiplier to section");
            }
            return CMatrix::diagonal(d);
        }
        case Multiplier::Kind::BlockPhase: {
            if (base_size % 2) throw InvalidSpec("multiplied: block phase needs block section");
            std::vector<cplx> d(base_size);
            for (std::size_t i = 0; i < base_size / 2; ++i) {
                d[i] = std::polar(1.0, -m.theta);
                d[i + base_size / 2] = std::polar(1.0, m.theta);
            }
            return CMatrix::diagonal(d);
        }
        case Multiplier::Kind::HlResolvent: {
            if (base_size != 2 * pos.size())
                throw InvalidSpec("multiplied: resolvent multiplier needs Hain-Lust section");
            std::vector<cplx> d(base_size);
            for (std::size_t i = 0; i < pos.size(); ++i) {
                d[i] = 1.0;
                d[i + pos.size()] = m.hl_eps / (FamilyAccess::u(base)(pos[i]) - m.hl_lambda);
            }
            return CMatrix::diagonal(d);
        }
    }
    throw InvalidSpec("multiplied: unknown multiplier kind");
}

PencilSection section_on_grid(const PencilFamily& f, const std::vector<double>& x, double h) {
    const std::size_t n = x.size();
    switch (f.kind()) {
        case PencilFamily::Kind::Schrodinger1d:
            return {laplacian_plus(x, h, FamilyAccess::v(f)), CMatrix::identity(n)};
        case PencilFamily::Kind::SturmLiouvilleIndefinite:
            return {laplacian_plus(x, h, FamilyAccess::v(f)), diag_sample(x, FamilyAccess::b(f))};
        case PencilFamily::Kind::Dirac1d: {
            const CMatrix d1 = first_derivative(n, h);
            CMatrix a12(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) a12(i, j) = cplx(0, -1) * d1(i, j);
            std::vector<cplx> up(n), dn(n);
            for (std::size_t i = 0; i < n; ++i) {
                up[i] = 1.0 + FamilyAccess::v(f)(x[i]);
                dn[i] = -1.0 + FamilyAccess::v(f)(x[i]);
            }
            return {assemble_blocks(CMatrix::diagonal(up), a12, a12, CMatrix::diagonal(dn)),
                    CMatrix::identity(2 * n)};
        }
        case PencilFamily::Kind::Stokes1d: {
            const CMatrix d1 = first_derivative(n, h);
            CMatrix a12(n, n), a21(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    a12(i, j) = FamilyAccess::gamma(f) * d1(i, j);
                    a21(i, j) = FamilyAccess::delta(f) * d1(i, j);
                }
            return {assemble_blocks(laplacian_plus(x, h, nullptr), a12, a21,
                                    diag_sample(x, FamilyAccess::u(f))),
                    CMatrix::identity(2 * n)};
        }
        case PencilFamily::Kind::HainLust:
            return {assemble_blocks(laplacian_plus(x, h, FamilyAccess::q(f)), diag_sample(x, FamilyAccess::w(f)),
                                    diag_sample(x, FamilyAccess::v(f)), diag_sample(x, FamilyAccess::u(f))),
                    CMatrix::identity(2 * n)};
        case PencilFamily::Kind::Multiplied: {
            PencilSection base = section_on_grid(*f.base(), x, h);
            const CMatrix m = multiplier_sample(f, x, base.A.rows());
            return {m * base.A, m * base.B};
        }
        default:
            throw InvalidSpec("section_on_grid: not a differential family");
    }
}

}  // namespace

PencilSection section(const PencilFamily& f, const TruncationSpec& t) {
    switch (f.kind()) {
        case PencilFamily::Kind::Diagonal: {
            if (t.n < 1) throw InvalidSpec("diagonal section needs N >= 1");
            std::vector<cplx> a(t.n), b(t.n);
            for (std::size_t i = 0; i < t.n; ++i) {
                a[i] = f.a_(double(i + 1));
                b[i] = f.b_(double(i + 1));
            }
            return {CMatrix::diagonal(a), CMatrix::diagonal(b)};
        }
        case PencilFamily::Kind::Block2x2: {
            if (t.n < 2 || t.n % 2) throw InvalidSpec("block section size must be even");
            const std::size_t k = t.n / 2;
            CMatrix a(t.n, t.n), b(t.n, t.n);
            for (std::size_t i = 0; i < k; ++i) {
                const double nn = double(i + 1);
                a(i, i) = f.c11_(nn);
                a(i, i + k) = f.c12_ ? f.c12_(nn) : cplx(0, 0);
                a(i + k, i) = f.c21_ ? f.c21_(nn) : cplx(0, 0);
                a(i + k, i + k) = f.c22_(nn);
                b(i, i) = f.b11_(nn);
                b(i + k, i + k) = f.b22_(nn);
            }
            return {std::move(a), std::move(b)};
        }
        case PencilFamily::Kind::Literal:
            return {f.lit_a_, f.lit_b_};
        case PencilFamily::Kind::Multiplied: {
            if (!f.base()->is_differential()) {
                PencilSection base = section(*f.base(), t);
                std::vector<double> pos;
                const std::size_t count = f.base()->kind() == PencilFamily::Kind::Block2x2
                                              ? base.A.rows() / 2
                                              : base.A.rows();
                for (std::size_t i = 0; i < count; ++i) pos.push_back(double(i + 1));
                const CMatrix m = multiplier_sample(f, pos, base.A.rows());
                return {m * base.A, m * base.B};
            }
            check_differential_spec(t);
            const double h = 2.0 * t.half_length / double(t.n + 1);
            return section_on_grid(f, section_grid(t), h);
        }
        default: {
            check_differential_spec(t);
            const double h = 2.0 * t.half_length / double(t.n + 1);
            return section_on_grid(f, section_grid(t), h);
        }
    }
}

std::optional<std::vector<PencilSection>> family_window(const PencilFamily& f, double depth,
                                                        std::size_t size) {
    constexpr double kWindowStep = 0.1;
    if (size < 2) throw InvalidSpec("family_window: window too small");
    switch (f.kind()) {
        case PencilFamily::Kind::Diagonal: {
            const std::size_t m = std::size_t(std::max(1.0, depth));
            std::vector<cplx> a(size), b(size);
            for (std::size_t i = 0; i < size; ++i) {
                a[i] = f.a_(double(m + i));
                b[i] = f.b_(double(m + i));
            }
            std::vector<PencilSection> out;
            out.push_back({CMatrix::diagonal(a), CMatrix::diagonal(b)});
            return out;
        }
        case PencilFamily::Kind::Block2x2: {
            const std::size_t m = std::size_t(std::max(1.0, depth));
            CMatrix a(2 * size, 2 * size), b(2 * size, 2 * size);
            for (std::size_t i = 0; i < size; ++i) {
                const double nn = double(m + i);
                a(i, i) = f.c11_(nn);
                a(i, i + size) = f.c12_ ? f.c12_(nn) : cplx(0, 0);
                a(i + size, i) = f.c21_ ? f.c21_(nn) : cplx(0, 0);
                a(i + size, i + size) = f.c22_(nn);
                b(i, i) = f.b11_(nn);
                b(i + size, i + size) = f.b22_(nn);
            }
            std::vector<PencilSection> out;
            out.push_back({std::move(a), std::move(b)});
            return out;
        }
        case PencilFamily::Kind::Multiplied: {
            auto base_windows = family_window(*f.base(), depth, size);
            if (!base_windows) return std::nullopt;
            // multiplication by a diagonal sample commutes with coordinate
            // windows, so the multiplier applies per window block
            std::vector<PencilSection> out;
            for (std::size_t w = 0; w < base_windows->size(); ++w) {
                const PencilSection& blk = (*base_windows)[w];
                std::vector<double> pos;
                if (f.base()->is_differential()) {
                    pos = (w == 0) ? window_grid_left(depth, size, kWindowStep)
                                   : window_grid_right(depth, size, kWindowStep);
                } else {
                    const std::size_t m = std::size_t(std::max(1.0, depth));
                    for (std::size_t i = 0; i < size; ++i) pos.push_back(double(m + i));
                }
                const CMatrix mult = multiplier_sample(f, pos, blk.A.rows());
                out.push_back({mult * blk.A, mult * blk.B});
            }
            return out;
        }
        case PencilFamily::Kind::Literal:
            return std::nullopt;
        default: {
            // differential kinds: symmetric two-sided windows at physical depth
            const double h = kWindowStep;
            std::vector<PencilSection> out;
            for (int side = 0; side < 2; ++side) {
                const std::vector<double> x = (side == 0)
                                                  ? window_grid_left(depth, size, h)
                                                  : window_grid_right(depth, size, h);
                out.push_back(section_on_grid(f, x, h));
            }
            return out;
        }
    }
}

PencilFamily sl_indefinite(double mminus, double mplus, ScalarFn well, double a, double b) {
    if (mminus < 0.0 || mplus < 0.0)
        throw InvalidSpec("sl_indefinite: limits must be nonnegative");
    if (b < a) throw InvalidSpec("sl_indefinite: need a <= b");
    ScalarFn v = [=](double x) -> cplx {
        double base;
        if (x <= a)
            base = mminus;
        else if (x >= b)
            base = mplus;
        else
            base = mminus + (mplus - mminus) * (x - a) / (b - a);
        return base + (well ? well(x) : cplx(0, 0));
    };
    ScalarFn j = [=](double x) -> cplx {
        if (a == b) return x < a ? -1.0 : 1.0;
        if (x < a) return -1.0;
        if (x > b) return 1.0;
        return -1.0 + 2.0 * (x - a) / (b - a);
    };
    return PencilFamily::sturm_liouville(std::move(v), std::move(j), "sl_indefinite");
}

Multiplier sl_rotation_multiplier(double phi, double a, double b) {
    return Multiplier::scalar([=](double x) -> cplx {
        if (x <= a) return std::polar(1.0, phi);
        if (x >= b) return 1.0;
        const double t = (b - x) / (b - a);
        return std::polar(1.0, t * phi);
    });
}

PencilFamily jt_pencil_family() {
    return PencilFamily::block2x2_diag([](double n) { return cplx(n, 0); }, nullptr, nullptr,
                                       [](double n) { return cplx(n, 0); },
                                       [](double) { return cplx(1, 0); },
                                       [](double) { return cplx(-1, 0); }, "jt_pencil");
}

PencilFamily jt_operator_family() {
    return PencilFamily::diagonal(
        [](double n) -> cplx {
            const long k = long(std::llround(n));
            const long mag = (k + 1) / 2;
            return (k % 2 == 1) ? cplx(double(mag), 0) : cplx(-double(mag), 0);
        },
        [](double) { return cplx(1, 0); }, "jt_operator");
}

std::pair<cplx, cplx> stokes_symbol(cplx u0, cplx gd, double k) {
    const cplx k2(k * k, 0.0);
    const cplx mean = 0.5 * (k2 + u0);
    const cplx disc = std::sqrt(0.25 * (k2 - u0) * (k2 - u0) - gd * k2);
    return {mean + disc, mean - disc};
}

}  // namespace pencilrange
