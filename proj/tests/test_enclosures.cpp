#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pencilrange/enclosures.hpp"
#include "pencilrange/matkernel.hpp"
#include "pencilrange/ranges.hpp"
#include "test_support.hpp"

using namespace pencilrange;

TEST_CASE("dirac exclusion for the free operator") {
    const EnclosureSpec spec = EnclosureSpec::dirac(EssRan::from_points({cplx(0, 0)}));
    const auto at_zero = dirac_excluded(spec, cplx(0, 0));
    CHECK(at_zero.excluded);
    REQUIRE(at_zero.bound.has_value());
    CHECK(*at_zero.bound == doctest::Approx(2.0).epsilon(1e-3));  // best phi = pi/4

    CHECK_FALSE(dirac_excluded(spec, cplx(1.5, 0)).excluded);
    CHECK_FALSE(dirac_excluded(spec, cplx(-3.0, 0)).excluded);
    CHECK(dirac_excluded(spec, cplx(0, 5)).excluded);
    CHECK(dirac_excluded(spec, cplx(0.4, -2)).excluded);
}

TEST_CASE("dirac exclusion is translation equivariant for constant potentials") {
    const EnclosureSpec spec = EnclosureSpec::dirac(EssRan::from_points({cplx(0, 1)}));
    CHECK(dirac_excluded(spec, cplx(0, 1)).excluded);  // gap center shifted by i
    CHECK_FALSE(dirac_excluded(spec, cplx(1.5, 1)).excluded);
}

TEST_CASE("dirac exclusion never removes points of Sigma") {
    const EssRan hull = EssRan::polygon({cplx(-0.3, 0), cplx(0.3, 0.4)});
    const EnclosureSpec spec = EnclosureSpec::dirac(hull);
    for (double s = 0.0; s <= 5.0; s += 0.25) {
        for (double t = 0.0; t <= 1.0; t += 0.25) {
            const cplx v = (1.0 - t) * cplx(-0.3, 0) + t * cplx(0.3, 0.4);
            CHECK_FALSE(dirac_excluded(spec, cplx(-1, 0) + v - s).excluded);
            CHECK_FALSE(dirac_excluded(spec, cplx(1, 0) + v + s).excluded);
        }
    }
}

TEST_CASE("dirac exclusion matches the brute-force sector oracle") {
    const EssRan hull = EssRan::polygon({cplx(-0.3, 0), cplx(0.3, 0.4)});
    const EnclosureSpec spec = EnclosureSpec::dirac(hull);
    std::size_t mismatch = 0, total = 0;
    for (int iy = 0; iy < 40; ++iy)
        for (int ix = 0; ix < 40; ++ix) {
            const cplx lam(-3.0 + 6.0 * ix / 39.0, -3.0 + 6.0 * iy / 39.0);
            const bool coarse = dirac_excluded(spec, lam, 256).excluded;
            const bool fine = dirac_excluded(spec, lam, 4096).excluded;
            // the coarse grid is a subset of the fine grid, so exclusion can
            // only grow with refinement
            if (coarse) CHECK(fine);
            mismatch += std::size_t(coarse != fine);
            ++total;
        }
    CHECK(mismatch <= total / 50);
}

TEST_CASE("stokes region branches") {
    const EssRan essran = EssRan::from_points({cplx(-1, 1)});
    CHECK(stokes_region_contains(essran, cplx(3, 0)));        // on [0, inf)
    CHECK_FALSE(stokes_region_contains(essran, cplx(-1, -2)));  // Re<0, dist 3 > 1
    CHECK(stokes_region_contains(essran, cplx(-1, 0.5)));     // Re<0, dist 0.5
    CHECK(stokes_region_contains(essran, cplx(0, 1.0)));      // dist 1 = |l|/|Im|
    CHECK_FALSE(stokes_region_contains(essran, cplx(4, 4)));  // dist 5.8 > sqrt(2)
}

TEST_CASE("stokes region contains the symbol curves") {
    const EssRan essran = EssRan::from_points({cplx(-1, 1)});
    const double slack = 0.02;
    for (int j = 0; j <= 6; ++j) {
        const cplx gd = std::polar(1.0, M_PI * j / 6.0);
        for (int k = 0; k < 2000; ++k) {
            const double kk = -8.0 + 16.0 * k / 1999.0;
            const auto [z1, z2] = stokes_symbol(cplx(-1, 1), gd, kk);
            CHECK(stokes_region_contains(essran, z1, slack));
            CHECK(stokes_region_contains(essran, z2, slack));
        }
    }
}

TEST_CASE("stokes region contains the 1-neighbourhood of essran") {
    const EssRan essran = EssRan::circle(cplx(0, 0), 3.0);
    auto g = pr_test::rng(5);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), rad(0.0, 0.999);
    for (int k = 0; k < 500; ++k) {
        const cplx on_circle = std::polar(3.0, ang(g));
        const cplx z = on_circle + std::polar(rad(g), ang(g));
        CHECK(stokes_region_contains(essran, z, 1e-12));
    }
}

TEST_CASE("stokes raster shows the topology change across radii") {
    for (double radius : {1.0, 3.0, 10.0}) {
        const EnclosureSpec spec = EnclosureSpec::stokes(EssRan::circle(cplx(0, 0), radius));
        const double reach = radius + 2.0;
        const Raster r =
            stokes_region(spec, Box{-reach, reach, -reach, reach}, 201, 201);
        std::size_t hole = 0;
        for (std::size_t iy = 0; iy < r.ny(); ++iy)
            for (std::size_t ix = 0; ix < r.nx(); ++ix)
                if (!r.get(ix, iy) && std::abs(r.center(ix, iy)) < radius / 2.0) ++hole;
        if (radius == 1.0)
            CHECK(hole == 0);
        else
            CHECK(hole > 0);
    }
}

TEST_CASE("stokes multiplier inequality in the pure-distance regime") {
    // A-section: discretized -d^2/dx^2 so that W(A) is close to [0, inf)
    auto lap = PencilFamily::schrodinger1d([](double) { return cplx(0, 0); });
    const CMatrix a = section(lap, TruncationSpec::interval(8.0, 120)).A;
    const DBlock d = DBlock::multiplication(EssRan::from_points({cplx(-1, 1)}));

    const StokesBounds unit{0.0, 1.0, 0.0, 1.0};  // a=c=0, b=d=1/cos(0)
    CHECK(stokes_multiplier_excludes(a, d, cplx(-1, -2), 0.0, unit));   // dist 3 > 1
    CHECK_FALSE(stokes_multiplier_excludes(a, d, cplx(-1, 0.5), 0.0, unit));  // dist 0.5
    CHECK_FALSE(stokes_multiplier_excludes(a, d, cplx(-1, 1), 0.0, unit));    // on sigma(D)
    CHECK_THROWS_AS(
        (void)stokes_multiplier_excludes(a, d, cplx(5, 0), 0.0, unit), NotApplicable);

    const DBlock dm = DBlock::finite(CMatrix::diagonal({cplx(-5, 1), cplx(7, 0)}));
    const StokesBounds tiny{0.0, 0.01, 0.0, 0.01};
    CHECK(stokes_multiplier_excludes(a, dm, cplx(-100, 0), 0.0, tiny));
    // lambda in sigma(D) with r > 0: the inequality cannot hold
    CHECK_FALSE(stokes_multiplier_excludes(a, dm, cplx(-5, 1), 0.0, tiny));
}

TEST_CASE("gap_region on the paper blocks and the pencil cross-check") {
    const EnclosureSpec gap = gap_region(EssRan::from_points({cplx(-3, 0), cplx(-1, 0)}),
                                         EssRan::from_points({cplx(2, 0), cplx(5, 0)}), false);
    CHECK(gap.selfadjoint_exact);
    CHECK(gap.contains(cplx(-2, 0)));
    CHECK(gap.contains(cplx(3.5, 0)));
    CHECK_FALSE(gap.contains(cplx(0.5, 0)));
    CHECK_FALSE(gap.contains(cplx(6, 0)));
    CHECK_FALSE(gap.contains(cplx(3, 1)));

    // independent route: raster of the pencil (BT, B) over the spectral hull box
    const PencilSection p{CMatrix::diagonal({cplx(3, 0), cplx(1, 0), cplx(2, 0), cplx(5, 0)}),
                          CMatrix::diagonal({cplx(-1, 0), cplx(-1, 0), cplx(1, 0), cplx(1, 0)})};
    const Box box{-3, 5, -0.5, 0.5};
    const Raster r = pencil_range(p, box, 160, 21);
    const double tol = r.cell_diag();
    // the membership tolerance (one cell diagonal on dist(0, W(A - lambda B)))
    // maps to up to ~3 cells in the lambda plane here: the hull-distance
    // slope along the off-axis direction is 3|Im| / (2 Re - 1) on the
    // binding edge, i.e. 1/3 at the outer endpoints
    for (std::size_t iy = 0; iy < r.ny(); ++iy)
        for (std::size_t ix = 0; ix < r.nx(); ++ix) {
            const cplx z = r.center(ix, iy);
            if (gap.contains(z, 0.25 * tol)) continue;  // near-set cells are free
            if (!gap.contains(z, 3.5 * tol)) CHECK_FALSE(r.get(ix, iy));
        }
    // on the real axis the identity is cell-exact
    for (std::size_t ix = 0; ix < r.nx(); ++ix) {
        const cplx z = r.center(ix, r.ny() / 2);
        REQUIRE(std::abs(z.imag()) <= 1e-12);
        if (gap.contains(z, 0.25 * tol))
            CHECK(r.get(ix, r.ny() / 2));
        else if (!gap.contains(z, 1.0 * tol))
            CHECK_FALSE(r.get(ix, r.ny() / 2));
    }
    // every set point is covered within one cell
    for (double x = -3.0; x <= 5.0; x += 0.121) {
        if (!gap.contains(cplx(x, 0))) continue;
        CHECK(r.contains(cplx(std::clamp(x, -3.0 + tol, 5.0 - tol), 0.0)));
    }

    CHECK_THROWS_AS((void)gap_region(EssRan::from_points({cplx(0, 0), cplx(1, 0)}),
                                     EssRan::from_points({cplx(1, 0), cplx(2, 0)}), false),
                    GapViolated);
}

TEST_CASE("random gapped Hermitian pairs obey the half-plane confinement") {
    auto g = pr_test::rng(17);
    for (int rep = 0; rep < 8; ++rep) {
        CMatrix t1 = pr_test::random_hermitian(3, g);
        CMatrix t2 = pr_test::random_hermitian(3, g);
        const auto v1 = hermitian_eigvals(t1);
        const auto v2 = hermitian_eigvals(t2);
        // shift blocks to open a gap (-inf, -1] ... [1, inf)
        for (std::size_t i = 0; i < 3; ++i) {
            t1(i, i) -= v1.back() + 1.0;
            t2(i, i) += 1.0 - v2.front();
        }
        CMatrix bt(6, 6), b(6, 6);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                bt(i, j) = -t1(i, j);
                bt(i + 3, j + 3) = t2(i, j);
            }
        for (std::size_t i = 0; i < 3; ++i) {
            b(i, i) = -1.0;
            b(i + 3, i + 3) = 1.0;
        }
        const auto nv1 = hermitian_eigvals(t1);
        const auto nv2 = hermitian_eigvals(t2);
        const double a = nv1.back(), bb = nv2.front();
        const Raster r = pencil_range({bt, b}, Box{-6, 6, -2, 2}, 90, 30);
        const double tol = r.cell_diag();
        for (std::size_t iy = 0; iy < r.ny(); ++iy)
            for (std::size_t ix = 0; ix < r.nx(); ++ix)
                if (r.get(ix, iy)) {
                    const double re = r.center(ix, iy).real();
                    CHECK((re <= a + tol || re >= bb - tol));
                }
    }
}

TEST_CASE("multiplier estimate with the identity is the numerical range") {
    auto g = pr_test::rng(23);
    const CMatrix t = pr_test::random_matrix(5, g);
    const Box box{-4, 4, -4, 4};
    const Raster est = multiplier_spectrum_estimate(t, {CMatrix::identity(5)}, box, 90, 90, 256);
    const SupportFn s = nrange(t, 256);
    const double tol = est.cell_diag();
    for (std::size_t iy = 0; iy < est.ny(); ++iy)
        for (std::size_t ix = 0; ix < est.nx(); ++ix) {
            const double d = s.distance(est.center(ix, iy));
            if (d <= 0.25 * tol) CHECK(est.get(ix, iy));
            if (d > 2.0 * tol) CHECK_FALSE(est.get(ix, iy));
        }
}

TEST_CASE("polar multipliers sharpen the estimate monotonically") {
    auto g = pr_test::rng(29);
    const CMatrix t = pr_test::random_matrix(6, g);
    const auto eigs = general_eig(t);
    const Box box{-5, 5, -5, 5};
    const std::size_t res = 80;

    Raster sigma_r(box, res, res);
    for (const cplx z : eigs) {
        // mark the eigenvalue cells
        for (std::size_t iy = 0; iy < res; ++iy)
            for (std::size_t ix = 0; ix < res; ++ix)
                if (std::abs(sigma_r.center(ix, iy) - z) <= 0.5 * sigma_r.cell_diag())
                    sigma_r.set(ix, iy, true);
    }

    std::vector<CMatrix> mults{CMatrix::identity(6)};
    const Raster est0 = multiplier_spectrum_estimate(t, mults, box, res, res, 128);
    double prev = hausdorff(est0, sigma_r);

    // eigenvalues always inside, with one-cell slack
    for (const cplx z : eigs) CHECK(est0.contains(z));

    for (const cplx shift : {cplx(3.0, 3.0), cplx(-3.0, 1.5), cplx(0.5, -3.0)}) {
        mults.push_back(polar_multiplier(t, shift));
        const Raster est = multiplier_spectrum_estimate(t, mults, box, res, res, 128);
        for (const cplx z : eigs) CHECK(est.contains(z));
        const double h = hausdorff(est, sigma_r);
        CHECK(h <= prev + 0.5 * est.cell_diag());
        prev = h;
    }
    // the refined estimate is strictly better than {I} alone
    CHECK(prev < hausdorff(est0, sigma_r));
}

TEST_CASE("polar exclusion removes exterior points and keeps the spectrum") {
    auto g = pr_test::rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const CMatrix t = pr_test::random_matrix(5, g);
        const cplx lam = pr_test::random_cplx(g) * 2.0;
        CMatrix shifted = t;
        for (std::size_t i = 0; i < 5; ++i) shifted(i, i) -= lam;
        if (smallest_singular(shifted) <= 1e-6) continue;
        const CMatrix b = polar_multiplier(t, lam);
        CHECK_FALSE(pencil_range_member({b * t, b}, lam, 1e-7, 128));
    }
    // spectrum is never excluded by any tested multiplier
    const CMatrix t = pr_test::random_matrix(5, g);
    std::vector<CMatrix> mults{CMatrix::identity(5), polar_multiplier(t, cplx(4, 4))};
    for (const cplx z : general_eig(t))
        for (const CMatrix& b : mults)
            CHECK(pencil_range_member({b * t, b}, z, 1e-7 * (1.0 + std::abs(z)), 128));
}

TEST_CASE("multiplier estimate rejects singular multipliers") {
    const CMatrix t = CMatrix::identity(3);
    CMatrix singular(3, 3);
    singular(0, 0) = 1.0;  // rank deficient
    CHECK_THROWS_AS((void)multiplier_spectrum_estimate(t, {singular}, Box{-1, 1, -1, 1}, 10, 10),
                    InvalidSpec);
}

TEST_CASE("enclosure JSON round trip") {
    EnclosureSpec gap = gap_region(EssRan::from_points({cplx(-3, 0), cplx(-1, 0)}),
                                   EssRan::from_points({cplx(2, 0), cplx(5, 0)}), true);
    const EnclosureSpec gap2 = EnclosureSpec::from_json(gap.to_json());
    CHECK(gap2.kind == EnclosureSpec::Kind::Gap);
    CHECK(gap2.a == gap.a);
    CHECK(gap2.b == gap.b);
    CHECK(gap2.essential);
    CHECK(gap2.selfadjoint_exact);
    CHECK(gap2.contains(cplx(-2, 0)));

    const EnclosureSpec st = EnclosureSpec::stokes(EssRan::circle(cplx(0, 0), 3.0));
    const EnclosureSpec st2 = EnclosureSpec::from_json(st.to_json());
    CHECK(st2.kind == EnclosureSpec::Kind::Stokes);
    CHECK(st2.essran.radius == 3.0);
    CHECK(st2.contains(cplx(3.5, 0.2)));
}
