#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pencilrange/gallery.hpp"
#include "pencilrange/matkernel.hpp"
#include "pencilrange/ranges.hpp"
#include "test_support.hpp"

using namespace pencilrange;

namespace {

PencilSection unifpos_section(std::size_t n) {
    std::vector<cplx> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = double(i + 1);
        a[i] = k * k + k;
        b[i] = k * k;
    }
    return {CMatrix::diagonal(a), CMatrix::diagonal(b)};
}

double interval_distance(double x, double lo, double hi) {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
}

}  // namespace

TEST_CASE("nrange of the scaled-harmonic diagonal family is [1+1/N, 2]") {
    const std::size_t n = 40;
    std::vector<cplx> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 + 1.0 / double(i + 1);
    const SupportFn s = nrange(CMatrix::diagonal(d));
    CHECK(s.values[0] == doctest::Approx(2.0).epsilon(1e-12));                // h(0) = max
    CHECK(s.values[s.values.size() / 2] ==
          doctest::Approx(-(1.0 + 1.0 / double(n))).epsilon(1e-12));          // h(pi) = -min
}

TEST_CASE("nrange of the Jordan block is the disk of radius 1/2") {
    CMatrix j(2, 2);
    j(0, 1) = 1.0;
    const SupportFn s = nrange(j, 256);
    for (double v : s.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(support_contains(s, cplx(0.49, 0), 0.0));
    CHECK_FALSE(support_contains(s, cplx(0.51, 0), 0.0));
}

TEST_CASE("nrange of a normal matrix is the hull of its eigenvalues") {
    const CMatrix m = CMatrix::diagonal({cplx(0, 0), cplx(0, 1), cplx(1, 0)});
    const SupportFn s = nrange(m, 360);
    const SupportFn hull = support_from_points({cplx(0, 0), cplx(0, 1), cplx(1, 0)}, 360);
    for (std::size_t k = 0; k < s.values.size(); ++k)
        CHECK(s.values[k] == doctest::Approx(hull.values[k]).epsilon(1e-12));
}

TEST_CASE("nrange boundary points lie on the support boundary") {
    auto g = pr_test::rng(3);
    const CMatrix m = pr_test::random_matrix(5, g);
    const SupportFn s = nrange(m, 256);
    for (const cplx z : nrange_boundary(m, 32)) {
        CHECK(support_contains(s, z, 1e-9));
        CHECK(s.distance(z) >= -1e-9);  // on or inside
    }
}

TEST_CASE("zero_in_nrange basics") {
    CHECK(zero_in_nrange(CMatrix::diagonal({cplx(-1, 0), cplx(1, 0)}), 0.0));
    CHECK_FALSE(zero_in_nrange(CMatrix::identity(3), 0.0));
    for (std::size_t n : {1, 2, 5, 40, 200}) {
        const PencilSection p = unifpos_section(n);
        CMatrix m = p.A;
        m -= p.B;  // A - 1*B = diag(n), positive
        CHECK_FALSE(zero_in_nrange(m, 0.0));
    }
}

TEST_CASE("pencil_range of the uniformly-positive example is the interval") {
    const PencilSection p = unifpos_section(50);
    const Box box{0.8, 2.2, -0.1, 0.1};
    const Raster r = pencil_range(p, box, 280, 40);
    const double lo = 1.0 + 1.0 / 50.0, hi = 2.0;
    const double tol = r.cell_diag();
    for (std::size_t iy = 0; iy < r.ny(); ++iy)
        for (std::size_t ix = 0; ix < r.nx(); ++ix) {
            const cplx c = r.center(ix, iy);
            const double d = std::hypot(interval_distance(c.real(), lo, hi), c.imag());
            if (d <= 0.25 * tol) CHECK(r.get(ix, iy));
            if (d > 2.0 * tol) CHECK_FALSE(r.get(ix, iy));
        }
}

TEST_CASE("pencil_range with B = I reduces to the numerical range") {
    auto g = pr_test::rng(7);
    const CMatrix a = pr_test::random_matrix(5, g);
    const PencilSection p{a, CMatrix::identity(5)};
    const Box box{-4, 4, -4, 4};
    const Raster r = pencil_range(p, box, 120, 120);
    const SupportFn s = nrange(a);
    const double tol = r.cell_diag();
    for (std::size_t iy = 0; iy < r.ny(); ++iy)
        for (std::size_t ix = 0; ix < r.nx(); ++ix) {
            const double d = s.distance(r.center(ix, iy));
            if (d <= 0.25 * tol) CHECK(r.get(ix, iy));
            if (d > 2.0 * tol) CHECK_FALSE(r.get(ix, iy));
        }
}

TEST_CASE("pencil_range of the gap pencil against the Monte-Carlo hull oracle") {
    // BT = diag(3,1,2,5), B = diag(-1,-1,1,1)
    const PencilSection p{CMatrix::diagonal({cplx(3, 0), cplx(1, 0), cplx(2, 0), cplx(5, 0)}),
                          CMatrix::diagonal({cplx(-1, 0), cplx(-1, 0), cplx(1, 0), cplx(1, 0)})};
    const Box box{-4, 6, -1, 1};
    const std::size_t nx = 100, ny = 20;
    const Raster r = pencil_range(p, box, nx, ny);
    const double tol = r.cell_diag();

    // Monte-Carlo hull oracle: precompute (alpha_s, beta_s) = (<Ax,x>, <Bx,x>)
    auto g = pr_test::rng(12345);
    const std::size_t samples = 100000;
    std::vector<cplx> alpha(samples), beta(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = pr_test::random_unit(4, g);
        alpha[s] = rayleigh(p.A, x);
        beta[s] = rayleigh(p.B, x);
    }
    auto oracle_zero_in_hull = [&](cplx lambda, double margin) {
        // support of the sampled point cloud {alpha - lambda beta} over 90
        // angles; 0 inside iff every support value is >= -margin
        for (int k = 0; k < 90; ++k) {
            const double th = 2.0 * M_PI * k / 90.0;
            const double c = std::cos(th), sn = std::sin(th);
            double mx = -1e300;
            for (std::size_t s = 0; s < samples; ++s) {
                const cplx z = alpha[s] - lambda * beta[s];
                mx = std::max(mx, z.real() * c + z.imag() * sn);
            }
            if (mx < -margin) return false;
        }
        return true;
    };
    // sampled hull is inside W(A,B): oracle membership implies raster
    // membership (up to the raster tolerance)
    std::size_t oracle_members = 0;
    for (std::size_t iy = 0; iy < ny; iy += 3)
        for (std::size_t ix = 0; ix < nx; ix += 3) {
            const cplx lam = r.center(ix, iy);
            if (oracle_zero_in_hull(lam, 0.0)) {
                ++oracle_members;
                CHECK(r.get(ix, iy));
            }
        }
    CHECK(oracle_members > 10);
}

TEST_CASE("pencil_range scaling law for z in {2, i}") {
    auto g = pr_test::rng(11);
    const CMatrix a = pr_test::random_matrix(4, g);
    const CMatrix b = pr_test::random_hpd(4, g);
    const PencilSection p{a, b};
    const Box box{-3, 3, -3, 3};
    const std::size_t n = 60;
    const Raster base = pencil_range(p, box, n, n);

    // z = 2: pencil_range(2A, B) on the doubled box equals the base mask
    CMatrix a2 = a;
    a2 *= 2.0;
    const Raster scaled = pencil_range({a2, b}, Box{-6, 6, -6, 6}, n, n);
    std::size_t diff = 0;
    for (std::size_t k = 0; k < base.raw().size(); ++k)
        diff += std::size_t(base.raw()[k] != scaled.raw()[k]);
    CHECK(diff <= base.raw().size() / 50);  // boundary cells only

    // z = i: rotate mask by 90 degrees on the symmetric box
    CMatrix ai(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) ai(r, c) = cplx(0, 1) * a(r, c);
    const Raster rot = pencil_range({ai, b}, box, n, n);
    diff = 0;
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            // multiplication by i maps cell (ix, iy) to (n-1-iy, ix)
            const bool expect = base.get(ix, iy);
            const bool got = rot.get(n - 1 - iy, ix);
            diff += std::size_t(expect != got);
        }
    CHECK(diff <= base.raw().size() / 50);
}

TEST_CASE("pencil_range inversion law on robust sample points") {
    auto g = pr_test::rng(23);
    const CMatrix a = pr_test::random_matrix(4, g);
    const CMatrix b = pr_test::random_hpd(4, g);
    const PencilSection ab{a, b};
    const PencilSection ba{b, a};
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int tested = 0;
    for (int k = 0; k < 200 && tested < 40; ++k) {
        const cplx lam(u(g), u(g));
        if (std::abs(lam) < 0.3) continue;
        // only judge points with a robust margin under the direct test
        const bool in0 = pencil_range_member(ab, lam, 1e-9);
        const bool in_wide = pencil_range_member(ab, lam, 1e-3 * std::abs(lam));
        if (in0 != in_wide) continue;  // near the boundary; skip
        ++tested;
        CHECK(pencil_range_member(ba, 1.0 / lam, 1e-6) == in0);
    }
    CHECK(tested >= 20);
}

TEST_CASE("generalized eigenvalues lie in the pencil range") {
    auto g = pr_test::rng(31);
    for (int rep = 0; rep < 3; ++rep) {
        const CMatrix a = pr_test::random_matrix(5, g);
        const CMatrix b = pr_test::random_hpd(5, g);
        const auto eigs = generalized_eig(a, b);
        for (const cplx lam : eigs)
            CHECK(pencil_range_member({a, b}, lam, 1e-8 * (1.0 + std::abs(lam))));
    }
}

TEST_CASE("w_range_hpd on the uniformly-positive example has 1e-9 endpoints") {
    for (std::size_t n : {5, 50, 200}) {
        const PencilSection p = unifpos_section(n);
        const SupportFn s = w_range_hpd(p);
        CHECK(std::abs(s.values[0] - 2.0) <= 1e-9);
        CHECK(std::abs(s.values[s.values.size() / 2] + (1.0 + 1.0 / double(n))) <= 1e-9);
    }
}

TEST_CASE("w_range_hpd with B = I is the numerical range") {
    auto g = pr_test::rng(41);
    const CMatrix a = pr_test::random_matrix(6, g);
    const SupportFn s1 = w_range_hpd({a, CMatrix::identity(6)});
    const SupportFn s2 = nrange(a);
    for (std::size_t k = 0; k < s1.values.size(); ++k)
        CHECK(s1.values[k] == doctest::Approx(s2.values[k]).epsilon(1e-10));
}

TEST_CASE("w_range_hpd contains sampled Rayleigh ratios") {
    auto g = pr_test::rng(43);
    const CMatrix a = pr_test::random_matrix(5, g);
    const CMatrix b = pr_test::random_hpd(5, g);
    const SupportFn s = w_range_hpd({a, b});
    for (int k = 0; k < 2000; ++k) {
        const auto x = pr_test::random_unit(5, g);
        const cplx ratio = rayleigh(a, x) / rayleigh(b, x);
        CHECK(support_contains(s, ratio, 1e-6));
    }
}

TEST_CASE("ess_range_tail of the non-closed example: real line minus a gap at 0") {
    // A = diag((-1)^n n^4 + i n), B = diag(n^3 + i (-1)^n n^2)
    auto fam = PencilFamily::diagonal(
        [](double n) {
            const double s = (std::llround(n) % 2 == 0) ? 1.0 : -1.0;
            return cplx(s * n * n * n * n, n);
        },
        [](double n) {
            const double s = (std::llround(n) % 2 == 0) ? 1.0 : -1.0;
            return cplx(n * n * n, s * n * n);
        },
        "notclosed");
    const Box box{-3, 3, -3, 3};
    const Raster r = ess_range_tail(fam, box, 120, 121, {50, 100, 200}, 100);
    // real axis beyond the shrinking gap is covered
    for (double x : {-2.5, -1.0, -0.5, 0.5, 1.0, 2.5}) CHECK(r.contains(cplx(x, 0.0)));
    // far off-axis excluded
    for (double y : {2.0, -2.0}) {
        CHECK_FALSE(r.contains(cplx(0.0, y)));
        CHECK_FALSE(r.contains(cplx(1.0, y)));
    }
}

TEST_CASE("ess_range_tail of the line example covers the real axis (HPD route)") {
    auto fam = PencilFamily::diagonal(
        [](double n) {
            const double s = (std::llround(n) % 2 == 0) ? 1.0 : -1.0;
            return cplx(s * n * n * n, n);
        },
        [](double n) { return cplx(n * n, 0.0); }, "line");
    const Box box{-3, 3, -3, 3};
    const Raster r = ess_range_tail(fam, box, 120, 121, {50, 100, 200}, 100);
    for (double x = -2.8; x <= 2.8; x += 0.4) CHECK(r.contains(cplx(x, 0.0)));
    for (double y : {2.0, -2.0}) CHECK_FALSE(r.contains(cplx(0.5, y)));
}

TEST_CASE("ess_range_tail rejects families without coordinate structure") {
    auto fam = PencilFamily::literal(CMatrix::identity(3), CMatrix::identity(3));
    CHECK_THROWS_AS(
        (void)ess_range_tail(fam, Box{-1, 1, -1, 1}, 20, 20, {1.0}, 10), UnsupportedFamily);
}

TEST_CASE("qnr samples of a Hermitian block-diagonal matrix stay in the spectra hulls") {
    CMatrix t(4, 4);
    t(0, 0) = -3;
    t(1, 1) = -1;
    t(2, 2) = 2;
    t(3, 3) = 5;
    const auto pts = qnr_sample(t, 2, 2, 500, 99);
    for (const cplx z : pts) {
        CHECK(std::abs(z.imag()) <= 1e-12);
        const bool in1 = z.real() >= -3.0 - 1e-9 && z.real() <= -1.0 + 1e-9;
        const bool in2 = z.real() >= 2.0 - 1e-9 && z.real() <= 5.0 + 1e-9;
        CHECK((in1 || in2));
    }
}

TEST_CASE("qnr samples lie in every diagonal-multiplier pencil range") {
    auto g = pr_test::rng(55);
    const CMatrix t = pr_test::random_matrix(6, g);
    const auto pts = qnr_sample(t, 3, 3, 60, 7);
    for (const cplx z : pts) {
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const cplx av = std::polar(1.0, 2.0 * M_PI * j / 4.0);
                const cplx dv = std::polar(1.0, 2.0 * M_PI * k / 4.0);
                CMatrix m(6, 6);
                for (std::size_t r = 0; r < 6; ++r)
                    for (std::size_t c = 0; c < 6; ++c) {
                        const cplx shift = (r == c) ? z : cplx(0, 0);
                        m(r, c) = (r < 3 ? av : dv) * (t(r, c) - shift);
                    }
                CHECK(zero_in_nrange(m, 1e-8 * (1.0 + std::abs(z)), 256));
            }
    }
}

TEST_CASE("qnr samples reach extremal boundary points of the diagonal blocks") {
    // block-diagonal Hermitian: with x the top eigenvector of A, T_{x,y} is
    // triangular, so lambda_max(A) is attained exactly
    auto g = pr_test::rng(61);
    const CMatrix a = pr_test::random_hermitian(3, g);
    const CMatrix d = pr_test::random_hermitian(3, g);
    CMatrix t(6, 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            t(i, j) = a(i, j);
            t(i + 3, j + 3) = d(i, j);
        }
    const auto [amax, xvec] = hermitian_top_eigpair(a);
    const auto y = pr_test::random_unit(3, g);
    const cplx t11 = rayleigh(a, xvec);
    const cplx t22 = rayleigh(d, y);
    // eigenvalues of [[t11, *],[0, t22]]
    CHECK(std::abs(t11 - amax) <= 1e-9);
    (void)t22;
}

TEST_CASE("resolvent_bound on the uniformly-positive example at lambda = 0") {
    const PencilSection p = unifpos_section(3);  // A = diag(2,6,12), B = diag(1,4,9)
    const auto rb = resolvent_bound(p, cplx(0, 0));
    REQUIRE(rb.bound.has_value());
    CHECK(*rb.bound == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(rb.actual == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rb.actual <= *rb.bound * (1.0 + 1e-6));
}

TEST_CASE("resolvent_bound equality case A = B = I") {
    const PencilSection p{CMatrix::identity(4), CMatrix::identity(4)};
    const auto rb = resolvent_bound(p, cplx(0, 0));
    REQUIRE(rb.bound.has_value());
    CHECK(*rb.bound == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rb.actual == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("resolvent_bound is none inside the range or when 0 is in W(B)") {
    const PencilSection p = unifpos_section(3);
    CHECK_FALSE(resolvent_bound(p, cplx(1.5, 0)).bound.has_value());  // inside [4/3, 2]
    const PencilSection degenerate{CMatrix::identity(2),
                                   CMatrix::diagonal({cplx(-1, 0), cplx(1, 0)})};
    CHECK_FALSE(resolvent_bound(degenerate, cplx(5, 5)).bound.has_value());
}

TEST_CASE("resolvent inequality holds on random HPD pencils at exterior points") {
    auto g = pr_test::rng(77);
    int checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const CMatrix a = pr_test::random_matrix(5, g);
        const CMatrix b = pr_test::random_hpd(5, g);
        const PencilSection p{a, b};
        std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
        const auto [l2min, l2max] = hermitian_extremes(a.adjoint() * a);
        (void)l2min;
        const auto bev = hermitian_eigvals(b);
        const double radius = 2.0 * std::sqrt(std::max(l2max, 1.0)) / bev.front() + 1.0;
        for (int k = 0; k < 5; ++k) {
            const cplx lam = std::polar(radius * (1.0 + 0.3 * k), ang(g));
            const auto rb = resolvent_bound(p, lam);
            if (!rb.bound) continue;
            ++checked;
            CHECK(rb.actual <= *rb.bound * (1.0 + 1e-6));
        }
    }
    CHECK(checked >= 50);
}
