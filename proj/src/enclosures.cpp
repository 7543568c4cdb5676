#include "pencilrange/enclosures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "pencilrange/matkernel.hpp"
#include "pencilrange/ranges.hpp"

namespace pencilrange {

EnclosureSpec EnclosureSpec::half_lines(double a, double b) {
    EnclosureSpec e;
    e.kind = Kind::HalfLines;
    e.a = a;
    e.b = b;
    return e;
}

EnclosureSpec EnclosureSpec::dirac(EssRan essran_v) {
    EnclosureSpec e;
    e.kind = Kind::Dirac;
    e.essran = std::move(essran_v);
    return e;
}

EnclosureSpec EnclosureSpec::stokes(EssRan essran_u) {
    EnclosureSpec e;
    e.kind = Kind::Stokes;
    e.essran = std::move(essran_u);
    return e;
}

bool EnclosureSpec::contains(cplx z, double slack) const {
    switch (kind) {
        case Kind::Gap:
            if (selfadjoint_exact) {
                if (std::abs(z.imag()) > slack) return false;
                const double x = z.real();
                return (x >= lo1 - slack && x <= hi1 + slack) ||
                       (x >= lo2 - slack && x <= hi2 + slack);
            }
            return z.real() <= a + slack || z.real() >= b - slack;
        case Kind::HalfLines:
            if (std::abs(z.imag()) > slack) return false;
            return z.real() <= a + slack || z.real() >= b - slack;
        case Kind::Stokes:
            return stokes_region_contains(essran, z, slack);
        case Kind::Dirac:
            return !dirac_excluded(*this, z).excluded;
    }
    return false;
}

DiracExclusion dirac_excluded(const EnclosureSpec& spec, cplx lambda, std::size_t phi_grid) {
    const std::vector<cplx> hull = spec.essran.hull_vertices();
    DiracExclusion out;
    if (hull.empty()) return out;

    double best_quality = 0.0;
    for (std::size_t k = 0; k < phi_grid; ++k) {
        const double phi = (M_PI / 2.0) * double(k) / double(phi_grid);
        const cplx up = std::polar(1.0, phi);     // e^{i phi}
        const cplx dn = std::polar(1.0, -phi);    // e^{-i phi}

        // upward sector family: both rotated gap edges strictly below the axis
        double m_left = -std::numeric_limits<double>::infinity();
        double m_right = m_left;
        // downward family: both strictly above
        double p_left = std::numeric_limits<double>::infinity();
        double p_right = p_left;
        for (const cplx v : hull) {
            m_left = std::max(m_left, (up * (cplx(-1, 0) + v - lambda)).imag());
            m_right = std::max(m_right, (dn * (cplx(1, 0) + v - lambda)).imag());
            p_left = std::min(p_left, (dn * (cplx(-1, 0) + v - lambda)).imag());
            p_right = std::min(p_right, (up * (cplx(1, 0) + v - lambda)).imag());
        }
        double margin = 0.0;
        if (m_left < 0.0 && m_right < 0.0) margin = std::min(-m_left, -m_right);
        if (p_left > 0.0 && p_right > 0.0) margin = std::max(margin, std::min(p_left, p_right));
        if (margin > 0.0) {
            out.excluded = true;
            const double quality = std::cos(phi) * margin;
            if (quality > best_quality) {
                best_quality = quality;
                out.best_phi = phi;
                out.bound = 1.0 / quality;
            }
        }
    }
    return out;
}

bool stokes_region_contains(const EssRan& essran_u, cplx lambda, double slack) {
    const double dist = essran_u.distance(lambda);
    if (lambda.real() < slack && dist <= 1.0 + slack) return true;
    if (lambda.real() >= -slack && std::abs(lambda.imag()) <= slack) return true;  // [0, inf)
    if (lambda.real() >= -slack && lambda.imag() != 0.0 &&
        dist <= std::abs(lambda) / std::abs(lambda.imag()) + slack)
        return true;
    return false;
}

Raster stokes_region(const EnclosureSpec& spec, const Box& box, std::size_t nx, std::size_t ny) {
    Raster r(box, nx, ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            r.set(ix, iy, stokes_region_contains(spec.essran, r.center(ix, iy), 0.0));
    return r;
}

namespace {

double support_at(const CMatrix& m, double theta) {
    const std::size_t n = m.rows();
    const cplx w = std::polar(1.0, -theta);
    const CMatrix mh = m.adjoint();
    CMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = 0.5 * (w * m(i, j) + std::conj(w) * mh(i, j));
    auto [lmin, lmax] = hermitian_extremes(h);
    (void)lmin;
    return lmax;
}

}  // namespace

bool stokes_multiplier_excludes(const CMatrix& a_section, const DBlock& d_block, cplx lambda,
                                double phi, const StokesBounds& bounds) {
    // r = inf Re(e^{i phi} W(A - lambda)) = -sup Re(e^{i(phi+pi)} (W(A) - lambda))
    const double h = support_at(a_section, -phi - M_PI);
    const double r = -h - (std::polar(1.0, phi) * lambda).real();
    if (!(r > 0.0)) throw NotApplicable("stokes_multiplier_excludes: r(lambda, phi) <= 0");

    double resolvent_norm;
    if (d_block.essran) {
        const double dist = d_block.essran->distance(lambda);
        if (dist <= 0.0) return false;
        resolvent_norm = 1.0 / dist;
    } else if (d_block.matrix) {
        CMatrix m = *d_block.matrix;
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= lambda;
        const double smin = smallest_singular(m);
        if (smin <= 0.0) return false;
        resolvent_norm = 1.0 / smin;
    } else {
        throw NotApplicable("stokes_multiplier_excludes: empty D block");
    }

    const double lhs = (bounds.b + bounds.a / r) * (bounds.d + bounds.c / r);
    return lhs < 1.0 / (resolvent_norm * resolvent_norm);
}

EnclosureSpec gap_region(const EssRan& t1_range, const EssRan& t2_range, bool essential) {
    auto re_bounds = [](const EssRan& e) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        bool real = true;
        for (const cplx v : e.hull_vertices()) {
            lo = std::min(lo, v.real());
            hi = std::max(hi, v.real());
            if (std::abs(v.imag()) > 1e-12) real = false;
        }
        return std::tuple<double, double, bool>(lo, hi, real);
    };
    const auto [lo1, hi1, real1] = re_bounds(t1_range);
    const auto [lo2, hi2, real2] = re_bounds(t2_range);
    if (!(hi1 < lo2)) throw GapViolated("gap_region: sup(first) >= inf(second)");

    EnclosureSpec e;
    e.kind = EnclosureSpec::Kind::Gap;
    e.a = hi1;
    e.b = lo2;
    e.essential = essential;
    if (real1 && real2) {
        e.selfadjoint_exact = true;
        e.lo1 = lo1;
        e.hi1 = hi1;
        e.lo2 = lo2;
        e.hi2 = hi2;
    }
    return e;
}

Raster multiplier_spectrum_estimate(const CMatrix& t, const std::vector<CMatrix>& multipliers,
                                    const Box& box, std::size_t nx, std::size_t ny,
                                    std::size_t angles) {
    if (multipliers.empty()) throw InvalidSpec("multiplier_spectrum_estimate: no multipliers");
    std::optional<Raster> acc;
    for (const CMatrix& b : multipliers) {
        if (!(cond2(b) <= 1e10))
            throw InvalidSpec("multiplier_spectrum_estimate: multiplier is not invertible");
        const PencilSection p{b * t, b};
        Raster r = pencil_range(p, box, nx, ny, angles);
        acc = acc ? raster_intersect(*acc, r) : std::move(r);
    }
    return *acc;
}

// --- serialization ---------------------------------------------------------------

std::string EnclosureSpec::to_json() const {
    nlohmann::json j;
    const char* k = kind == Kind::Dirac    ? "dirac"
                    : kind == Kind::Stokes ? "stokes"
                    : kind == Kind::Gap    ? "gap"
                                           : "half_lines";
    j["kind"] = k;
    nlohmann::json hull = nlohmann::json::array();
    if (essran.kind == EssRan::Kind::Circle) {
        j["params"]["circle_center"] = {essran.center.real(), essran.center.imag()};
        j["params"]["circle_radius"] = essran.radius;
    } else {
        for (const cplx p : essran.points) hull.push_back({p.real(), p.imag()});
    }
    j["hull"] = hull;
    j["params"]["a"] = a;
    j["params"]["b"] = b;
    j["params"]["essential"] = essential;
    j["params"]["selfadjoint_exact"] = selfadjoint_exact;
    if (selfadjoint_exact)
        j["params"]["intervals"] = {{lo1, hi1}, {lo2, hi2}};
    j["params"]["polygon"] = essran.kind == EssRan::Kind::Polygon;
    return j.dump();
}

EnclosureSpec EnclosureSpec::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EnclosureSpec e;
    const std::string k = j.at("kind").get<std::string>();
    e.kind = k == "dirac"    ? Kind::Dirac
             : k == "stokes" ? Kind::Stokes
             : k == "gap"    ? Kind::Gap
                             : Kind::HalfLines;
    const auto& params = j.at("params");
    if (params.contains("circle_radius")) {
        const auto c = params.at("circle_center");
        e.essran = EssRan::circle({c[0].get<double>(), c[1].get<double>()},
                                  params.at("circle_radius").get<double>());
    } else {
        std::vector<cplx> pts;
        for (const auto& p : j.at("hull")) pts.push_back({p[0].get<double>(), p[1].get<double>()});
        e.essran = params.value("polygon", false) ? EssRan::polygon(std::move(pts))
                                                  : EssRan::from_points(std::move(pts));
    }
    e.a = params.at("a").get<double>();
    e.b = params.at("b").get<double>();
    e.essential = params.value("essential", false);
    e.selfadjoint_exact = params.value("selfadjoint_exact", false);
    if (e.selfadjoint_exact) {
        const auto& iv = params.at("intervals");
        e.lo1 = iv[0][0].get<double>();
        e.hi1 = iv[0][1].get<double>();
        e.lo2 = iv[1][0].get<double>();
        e.hi2 = iv[1][1].get<double>();
    }
    return e;
}

}  // namespace pencilrange
