#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pencilrange/gallery.hpp"
#include "pencilrange/region.hpp"

namespace pencilrange {

/// Analytic description of a spectral enclosure with an exact membership
/// predicate.
struct EnclosureSpec {
    enum class Kind { Dirac, Stokes, Gap, HalfLines };
    Kind kind = Kind::Gap;
    EssRan essran;                  // hull descriptor where applicable
    double a = 0.0, b = 0.0;        // gap endpoints (a_e, b_e for the essential variant)
    bool essential = false;
    bool selfadjoint_exact = false; // gap: exact interval union
    double lo1 = 0.0, hi1 = 0.0, lo2 = 0.0, hi2 = 0.0;  // selfadjoint intervals

    /// Membership with additive slack on every comparison.  One-dimensional
    /// pieces (interval unions, half-lines) live on the real axis; slack
    /// widens them into strips.
    bool contains(cplx z, double slack = 0.0) const;

    static EnclosureSpec half_lines(double a, double b);
    static EnclosureSpec dirac(EssRan essran_v);
    static EnclosureSpec stokes(EssRan essran_u);

    std::string to_json() const;
    static EnclosureSpec from_json(const std::string& text);
};

struct DiracExclusion {
    bool excluded = false;
    std::optional<double> best_phi;
    std::optional<double> bound;  // 1 / (cos(phi) * margin) at the best phi
};

/// Sector exclusion test for the Dirac pencil: lambda is excluded when some
/// sector angle phi (either the upward or downward family) pushes both
/// rotated gap edges strictly below the axis, uniformly over the hull of
/// essran(V).  Sound: a point of the enclosure is never excluded.
DiracExclusion dirac_excluded(const EnclosureSpec& spec, cplx lambda, std::size_t phi_grid = 256);

/// Membership in the three-branch Stokes enclosure.
bool stokes_region_contains(const EssRan& essran_u, cplx lambda, double slack = 0.0);

/// Raster of the Stokes enclosure (cellwise predicate).
Raster stokes_region(const EnclosureSpec& spec, const Box& box, std::size_t nx, std::size_t ny);

/// Second block D of a Stokes-type operator: a multiplication operator given
/// by its essential range, or a finite matrix.
struct DBlock {
    std::optional<EssRan> essran;
    std::optional<CMatrix> matrix;

    static DBlock multiplication(EssRan e) { return {std::move(e), std::nullopt}; }
    static DBlock finite(CMatrix m) { return {std::nullopt, std::move(m)}; }
};

struct StokesBounds {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // relative bounds at (lambda, phi)
};

/// The multiplier exclusion inequality (b + a/r)(d + c/r) < 1/||(D-lambda)^{-1}||^2
/// with r = inf Re(e^{i phi} W(A - lambda)).  Throws NotApplicable when r <= 0.
bool stokes_multiplier_excludes(const CMatrix& a_section, const DBlock& d_block, cplx lambda,
                                double phi, const StokesBounds& bounds);

/// Gap enclosure from the ranges of the two diagonal blocks: half-plane pair
/// {Re in (-inf, a] u [b, inf)}, or the exact interval union when both blocks
/// are declared selfadjoint (real hulls).  Throws GapViolated when a >= b.
EnclosureSpec gap_region(const EssRan& t1_range, const EssRan& t2_range, bool essential);

/// Intersection over invertible multipliers B of the rasters of W(BT, B);
/// always contains every eigenvalue of T within one cell.
Raster multiplier_spectrum_estimate(const CMatrix& t, const std::vector<CMatrix>& multipliers,
                                    const Box& box, std::size_t nx, std::size_t ny,
                                    std::size_t angles = 720);

}  // namespace pencilrange
