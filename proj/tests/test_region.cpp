#include <cmath>
#include <random>

#include "doctest.h"
#include "pencilrange/region.hpp"
#include "test_support.hpp"

using namespace pencilrange;

namespace {

Raster random_raster(const Box& box, std::size_t nx, std::size_t ny, std::mt19937_64& g,
                     double fill = 0.4) {
    Raster r(box, nx, ny);
    std::bernoulli_distribution coin(fill);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) r.set(ix, iy, coin(g));
    return r;
}

// brute-force point-set Hausdorff oracle
double hausdorff_oracle(const Raster& a, const Raster& b) {
    std::vector<cplx> pa, pb;
    for (std::size_t iy = 0; iy < a.ny(); ++iy)
        for (std::size_t ix = 0; ix < a.nx(); ++ix) {
            if (a.get(ix, iy)) pa.push_back(a.center(ix, iy));
            if (b.get(ix, iy)) pb.push_back(b.center(ix, iy));
        }
    auto directed = [](const std::vector<cplx>& p, const std::vector<cplx>& q) {
        double worst = 0.0;
        for (const cplx x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (const cplx y : q) best = std::min(best, std::abs(x - y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace

TEST_CASE("support_contains on a segment") {
    const SupportFn seg = support_from_points({cplx(0, 0), cplx(1, 0)}, 720);
    CHECK(support_contains(seg, cplx(0.5, 0), 0.0));
    CHECK_FALSE(support_contains(seg, cplx(0, 1), 0.0));
}

TEST_CASE("support of a disk: membership at radius 1/2") {
    // disk of radius 1/2 centered at 0 has constant support 1/2
    SupportFn disk;
    disk.values.assign(720, 0.5);
    CHECK(support_contains(disk, cplx(0.49, 0), 0.0));
    CHECK_FALSE(support_contains(disk, cplx(0.51, 0), 0.0));
}

TEST_CASE("points of the generating set pass at slack 0; outside points fail") {
    const std::size_t K = 90;
    std::vector<cplx> circle;
    for (int j = 0; j < 500; ++j) circle.push_back(std::polar(2.0, 2.0 * M_PI * j / 500.0));
    const SupportFn s = support_from_points(circle, K);
    for (const cplx p : circle) CHECK(support_contains(s, p, 0.0));
    // beyond the curvature bound scale*(pi/K)^2 the test must reject
    const double margin = 2.0 * std::pow(M_PI / double(K), 2.0);
    for (int j = 0; j < 16; ++j) {
        const cplx p = std::polar(2.0 + 3.0 * margin, 2.0 * M_PI * j / 16.0);
        CHECK_FALSE(support_contains(s, p, 0.0));
    }
}

TEST_CASE("support induce-resample round trip") {
    auto g = pr_test::rng(5);
    std::vector<cplx> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(pr_test::random_cplx(g));
    const std::size_t K = 360;
    const SupportFn s = support_from_points(pts, K);
    // vertices of the induced polygon: intersections of consecutive tangents
    std::vector<cplx> verts;
    for (std::size_t k = 0; k < K; ++k) {
        const double t0 = s.theta(k), t1 = s.theta((k + 1) % K);
        const double det = std::cos(t0) * std::sin(t1) - std::sin(t0) * std::cos(t1);
        if (std::abs(det) < 1e-14) continue;
        const double x = (s.values[k] * std::sin(t1) - s.values[(k + 1) % K] * std::sin(t0)) / det;
        const double y = (s.values[(k + 1) % K] * std::cos(t0) - s.values[k] * std::cos(t1)) / det;
        verts.push_back({x, y});
    }
    const SupportFn s2 = support_from_points(verts, K);
    double scale = 0.0;
    for (double v : s.values) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < K; ++k) CHECK(std::abs(s2.values[k] - s.values[k]) <= 1e-12 * scale);
}

TEST_CASE("raster intersect algebra") {
    const Box box{-1, 1, -1, 1};
    auto g = pr_test::rng(9);
    const Raster x = random_raster(box, 24, 17, g);
    const Raster y = random_raster(box, 24, 17, g);
    const Raster z = random_raster(box, 24, 17, g);

    CHECK(raster_intersect(x, x).raw() == x.raw());  // idempotent
    CHECK(raster_intersect(x, y).raw() == raster_intersect(y, x).raw());
    CHECK(raster_intersect(raster_intersect(x, y), z).raw() ==
          raster_intersect(x, raster_intersect(y, z)).raw());

    Raster empty(box, 24, 17);
    CHECK(raster_intersect(x, empty).count() == 0);

    Raster wrong(box, 25, 17);
    CHECK_THROWS_AS((void)raster_intersect(x, wrong), GridMismatch);
}

TEST_CASE("half-plane intersection gives the quadrant") {
    const Box box{-1, 1, -1, 1};
    Raster left(box, 40, 40), upper(box, 40, 40);
    for (std::size_t iy = 0; iy < 40; ++iy)
        for (std::size_t ix = 0; ix < 40; ++ix) {
            left.set(ix, iy, left.center(ix, iy).real() <= 0.0);
            upper.set(ix, iy, upper.center(ix, iy).imag() >= 0.0);
        }
    const Raster quad = raster_intersect(left, upper);
    for (std::size_t iy = 0; iy < 40; ++iy)
        for (std::size_t ix = 0; ix < 40; ++ix) {
            const cplx c = quad.center(ix, iy);
            CHECK(quad.get(ix, iy) == (c.real() <= 0.0 && c.imag() >= 0.0));
        }
}

TEST_CASE("hausdorff basics") {
    const Box box{0, 1, 0, 1};
    auto g = pr_test::rng(21);
    const Raster x = random_raster(box, 20, 20, g);
    CHECK(hausdorff(x, x) == 0.0);

    Raster a(box, 10, 10), b(box, 10, 10);
    a.set(2, 3, true);
    b.set(7, 3, true);
    const double d = std::abs(a.center(2, 3) - b.center(7, 3));
    CHECK(hausdorff(a, b) == doctest::Approx(d).epsilon(1e-12));

    Raster empty(box, 10, 10);
    CHECK_THROWS_AS((void)hausdorff(a, empty), EmptyRegion);
}

TEST_CASE("hausdorff of [0,1] vs [0,2] rasterized at step 0.01") {
    const Box box{-0.005, 2.075, -0.005, 0.005};  // 208 x 1 grid, step 0.01
    Raster a(box, 208, 1), b(box, 208, 1);
    for (std::size_t ix = 0; ix < 208; ++ix) {
        const double x = a.center(ix, 0).real();
        a.set(ix, 0, x >= 0.0 && x <= 1.0);
        b.set(ix, 0, x >= 0.0 && x <= 2.0);
    }
    const double d = hausdorff(a, b);
    CHECK(std::abs(d - 1.0) <= 0.011);
    CHECK(d == doctest::Approx(hausdorff_oracle(a, b)).epsilon(1e-12));
}

TEST_CASE("hausdorff matches brute-force oracle on random rasters") {
    const Box box{-2, 2, -1, 3};
    auto g = pr_test::rng(33);
    for (int rep = 0; rep < 3; ++rep) {
        const Raster a = random_raster(box, 18, 14, g, 0.2);
        const Raster b = random_raster(box, 18, 14, g, 0.2);
        if (!a.any() || !b.any()) continue;
        CHECK(hausdorff(a, b) == doctest::Approx(hausdorff_oracle(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("raster and support JSON round trips") {
    const Box box{-1, 2, -3, 4};
    auto g = pr_test::rng(17);
    const Raster r = random_raster(box, 13, 9, g);
    const Raster r2 = Raster::from_json(r.to_json());
    CHECK(r2.same_grid(r));
    CHECK(r2.raw() == r.raw());

    const SupportFn s = support_from_points({cplx(1, 2), cplx(-1, 0), cplx(0, -2)}, 64);
    const SupportFn s2 = support_from_json(support_to_json(s));
    REQUIRE(s2.values.size() == s.values.size());
    for (std::size_t k = 0; k < s.values.size(); ++k) CHECK(s2.values[k] == s.values[k]);
}
