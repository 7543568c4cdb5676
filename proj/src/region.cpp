#include "pencilrange/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace pencilrange {

double SupportFn::theta(std::size_t k) const {
    return 2.0 * M_PI * double(k) / double(values.size());
}

double SupportFn::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) m = std::min(m, v);
    return m;
}

double SupportFn::distance(cplx z) const {
    double d = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double th = theta(k);
        const double proj = z.real() * std::cos(th) + z.imag() * std::sin(th);
        d = std::max(d, proj - values[k]);
    }
    return d;
}

bool support_contains(const SupportFn& s, cplx z, double slack) {
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double th = s.theta(k);
        const double proj = z.real() * std::cos(th) + z.imag() * std::sin(th);
        if (proj > s.values[k] + slack) return false;
    }
    return true;
}

SupportFn support_from_points(const std::vector<cplx>& pts, std::size_t angles) {
    SupportFn s;
    s.values.assign(angles, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < angles; ++k) {
        const double th = 2.0 * M_PI * double(k) / double(angles);
        const double c = std::cos(th), sn = std::sin(th);
        for (const cplx p : pts)
            s.values[k] = std::max(s.values[k], p.real() * c + p.imag() * sn);
    }
    return s;
}

Raster::Raster(const Box& box, std::size_t nx, std::size_t ny)
    : box_(box), nx_(nx), ny_(ny), mask_(nx * ny, 0) {
    if (!box.valid() || nx == 0 || ny == 0)
        throw InvalidSpec("Raster: degenerate box or resolution");
}

double Raster::cell_diag() const { return std::hypot(dx(), dy()); }

cplx Raster::center(std::size_t ix, std::size_t iy) const {
    return {box_.re_min + (double(ix) + 0.5) * dx(), box_.im_min + (double(iy) + 0.5) * dy()};
}

bool Raster::contains(cplx z) const {
    if (z.real() < box_.re_min || z.real() > box_.re_max || z.imag() < box_.im_min ||
        z.imag() > box_.im_max)
        return false;
    auto clampi = [](long v, long hi) { return std::max(0L, std::min(v, hi)); };
    const long ix = clampi(long((z.real() - box_.re_min) / dx()), long(nx_) - 1);
    const long iy = clampi(long((z.imag() - box_.im_min) / dy()), long(ny_) - 1);
    return get(std::size_t(ix), std::size_t(iy));
}

std::size_t Raster::count() const {
    std::size_t c = 0;
    for (auto v : mask_) c += v;
    return c;
}

bool Raster::same_grid(const Raster& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && box_.re_min == other.box_.re_min &&
           box_.re_max == other.box_.re_max && box_.im_min == other.box_.im_min &&
           box_.im_max == other.box_.im_max;
}

std::vector<cplx> Raster::boundary_points() const {
    std::vector<cplx> pts;
    for (std::size_t iy = 0; iy < ny_; ++iy) {
        for (std::size_t ix = 0; ix < nx_; ++ix) {
            if (!get(ix, iy)) continue;
            const bool edge = ix == 0 || iy == 0 || ix + 1 == nx_ || iy + 1 == ny_ ||
                              !get(ix - 1, iy) || !get(ix + 1, iy) || !get(ix, iy - 1) ||
                              !get(ix, iy + 1);
            if (edge) pts.push_back(center(ix, iy));
        }
    }
    return pts;
}

Raster raster_intersect(const Raster& a, const Raster& b) {
    if (!a.same_grid(b)) throw GridMismatch("raster_intersect: grids differ");
    Raster out = a;
    for (std::size_t k = 0; k < out.raw().size(); ++k)
        out.raw()[k] = (a.raw()[k] && b.raw()[k]) ? 1 : 0;
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform (lower envelope of parabolas) over samples at
// positions step*i; f holds input squared distances (kInf = no site), out
// receives the result.
void edt_1d(const std::vector<double>& f, double step, std::vector<double>& out,
            std::vector<int>& v, std::vector<double>& z) {
    const int n = int(f.size());
    auto sq = [](double x) { return x * x; };
    int q0 = 0;
    while (q0 < n && f[q0] == kInf) ++q0;
    if (q0 == n) {
        std::fill(out.begin(), out.begin() + n, kInf);
        return;
    }
    int k = 0;
    v[0] = q0;
    z[0] = -kInf;
    z[1] = kInf;
    auto intersect = [&](int q, int p) {
        return (f[q] + sq(step * q) - f[p] - sq(step * p)) / (2.0 * step * (q - p));
    };
    for (int q = q0 + 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        double s = intersect(q, v[k]);
        while (k > 0 && s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        const double x = step * q;
        while (z[k + 1] < x) ++k;
        out[q] = sq(x - step * v[k]) + f[v[k]];
    }
}

// Exact squared EDT of the member set of r, in physical units.
std::vector<double> squared_edt(const Raster& r) {
    const std::size_t nx = r.nx(), ny = r.ny();
    std::vector<double> d(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            d[iy * nx + ix] = r.get(ix, iy) ? 0.0 : kInf;

    const std::size_t mx = std::max(nx, ny);
    std::vector<double> f(mx), out(mx), z(mx + 1);
    std::vector<int> v(mx);
    // rows
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) f[ix] = d[iy * nx + ix];
        f.resize(nx);
        out.resize(nx);
        edt_1d(f, r.dx(), out, v, z);
        for (std::size_t ix = 0; ix < nx; ++ix) d[iy * nx + ix] = out[ix];
        f.resize(mx);
        out.resize(mx);
    }
    // columns
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) f[iy] = d[iy * nx + ix];
        f.resize(ny);
        out.resize(ny);
        edt_1d(f, r.dy(), out, v, z);
        for (std::size_t iy = 0; iy < ny; ++iy) d[iy * nx + ix] = out[iy];
        f.resize(mx);
        out.resize(mx);
    }
    return d;
}

}  // namespace

double directed_hausdorff(const Raster& a, const Raster& b) {
    if (!a.same_grid(b)) throw GridMismatch("hausdorff: grids differ");
    if (!a.any() || !b.any()) throw EmptyRegion("hausdorff: empty raster");
    const auto db = squared_edt(b);
    double worst = 0.0;
    for (std::size_t iy = 0; iy < a.ny(); ++iy)
        for (std::size_t ix = 0; ix < a.nx(); ++ix)
            if (a.get(ix, iy)) worst = std::max(worst, db[iy * a.nx() + ix]);
    return std::sqrt(worst);
}

double hausdorff(const Raster& a, const Raster& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Raster raster_of_support(const SupportFn& s, const Box& box, std::size_t nx, std::size_t ny,
                         double slack) {
    Raster r(box, nx, ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            r.set(ix, iy, support_contains(s, r.center(ix, iy), slack));
    return r;
}

// --- serialization -----------------------------------------------------------

std::string Raster::to_json() const {
    nlohmann::json j;
    j["box"] = {{"re_min", box_.re_min},
                {"re_max", box_.re_max},
                {"im_min", box_.im_min},
                {"im_max", box_.im_max}};
    j["nx"] = nx_;
    j["ny"] = ny_;
    // run-length encoding, alternating runs starting with a (possibly empty)
    // run of zeros
    std::vector<std::size_t> runs;
    std::uint8_t cur = 0;
    std::size_t len = 0;
    for (auto m : mask_) {
        if (m == cur) {
            ++len;
        } else {
            runs.push_back(len);
            cur = m;
            len = 1;
        }
    }
    runs.push_back(len);
    j["rle_mask"] = runs;
    return j.dump();
}

Raster Raster::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Box box{j.at("box").at("re_min").get<double>(), j.at("box").at("re_max").get<double>(),
            j.at("box").at("im_min").get<double>(), j.at("box").at("im_max").get<double>()};
    Raster r(box, j.at("nx").get<std::size_t>(), j.at("ny").get<std::size_t>());
    std::size_t pos = 0;
    std::uint8_t cur = 0;
    for (const auto& run : j.at("rle_mask")) {
        const std::size_t len = run.get<std::size_t>();
        if (pos + len > r.mask_.size()) throw IoError("raster rle overruns mask");
        std::fill(r.mask_.begin() + pos, r.mask_.begin() + pos + len, cur);
        pos += len;
        cur = cur ? 0 : 1;
    }
    if (pos != r.mask_.size()) throw IoError("raster rle underruns mask");
    return r;
}

std::string support_to_json(const SupportFn& s) {
    nlohmann::json j;
    j["angles_count"] = s.values.size();
    j["values"] = s.values;
    return j.dump();
}

SupportFn support_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SupportFn s;
    s.values = j.at("values").get<std::vector<double>>();
    if (s.values.size() != j.at("angles_count").get<std::size_t>())
        throw IoError("support function angle count mismatch");
    return s;
}

}  // namespace pencilrange
