#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pencilrange/cmatrix.hpp"
#include "pencilrange/region.hpp"

namespace pencilrange {

class PencilFamily;  // gallery

/// Finite section of the pencil lambda -> A - lambda B.
struct PencilSection {
    CMatrix A;
    CMatrix B;
};

/// Support function of W(M): h(theta) = lambda_max of Re(e^{-i theta} M).
SupportFn nrange(const CMatrix& m, std::size_t angles = 720);

/// Boundary points <Mv, v> for the top eigenvectors of the rotated Hermitian
/// parts (one per angle).
std::vector<cplx> nrange_boundary(const CMatrix& m, std::size_t angles = 256);

/// 0 in closure W(M) up to tol: min_theta h(theta) >= -tol.
bool zero_in_nrange(const CMatrix& m, double tol, std::size_t angles = 720);

/// Raster of W(A,B) = { lambda : 0 in closure W(A - lambda B) } with
/// membership tolerance one cell diagonal.
Raster pencil_range(const PencilSection& p, const Box& box, std::size_t nx, std::size_t ny,
                    std::size_t angles = 720);

/// Membership test of a single lambda with explicit tolerance (the predicate
/// pencil_range rasters).
bool pencil_range_member(const PencilSection& p, cplx lambda, double tol,
                         std::size_t angles = 720);

/// w(A,B) for Hermitian positive definite B via the congruence
/// B^{-1/2} A B^{-1/2}; throws NotPositive.
SupportFn w_range_hpd(const PencilSection& p, std::size_t angles = 720);

/// Essential-range estimate by intersecting pencil ranges of coordinate-window
/// compressions.  Diagonal families use index windows n in [depth,
/// depth+section_size); differential families use symmetric two-sided windows
/// at physical distance `depth` from the origin.  When every window B-section
/// is Hermitian positive definite the congruent form is used (w_e route),
/// otherwise the direct pencil membership (W_e route).
Raster ess_range_tail(const PencilFamily& f, const Box& box, std::size_t nx, std::size_t ny,
                      const std::vector<double>& tail_depths, std::size_t section_size,
                      std::size_t angles = 720);

/// Quadratic numerical range samples of a 2x2 block matrix with block sizes
/// (p, q): both eigenvalues of T_{x,y} per random unit pair.
std::vector<cplx> qnr_sample(const CMatrix& t, std::size_t p, std::size_t q,
                             std::size_t samples, std::uint64_t rng_seed);

struct ResolventBound {
    std::optional<double> bound;  // none when 0 in W(B) or lambda in W(A,B)
    double actual = 0.0;          // 1 / sigma_min(A - lambda B); inf if singular
};

/// Pencil resolvent estimate ||(A - lambda B)^{-1}|| <= 1 / (dist(0, W(B)) *
/// dist(lambda, W(A,B))) against the computed inverse norm.
ResolventBound resolvent_bound(const PencilSection& p, cplx lambda, std::size_t angles = 720);

/// Principal submatrix helper for block operators.
CMatrix subblock(const CMatrix& m, std::size_t r0, std::size_t r1, std::size_t c0,
                 std::size_t c1);

}  // namespace pencilrange
