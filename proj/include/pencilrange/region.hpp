#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pencilrange/cmatrix.hpp"
#include "pencilrange/errors.hpp"

namespace pencilrange {

/// Support function of a convex subset of C on a uniform angle grid:
/// values[k] = h(theta_k) = max Re(e^{-i theta_k} S), theta_k = 2 pi k / K.
struct SupportFn {
    std::vector<double> values;

    std::size_t angle_count() const { return values.size(); }
    double theta(std::size_t k) const;

    double min_value() const;
    /// Distance from z to the intersection of the sampled half-planes
    /// (0 when z lies inside all of them).  The sampled polygon contains the
    /// generating set, so this under-estimates dist(z, S) by at most the
    /// curvature term scale*(pi/K)^2.
    double distance(cplx z) const;
};

bool support_contains(const SupportFn& s, cplx z, double slack);
/// Convex hull support values of a finite point set (test / figure helper).
SupportFn support_from_points(const std::vector<cplx>& pts, std::size_t angles);

struct Box {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
    bool valid() const { return re_max > re_min && im_max > im_min; }
};

/// Boolean raster over a box; a cell's value is the membership of its center.
class Raster {
public:
    Raster() = default;
    Raster(const Box& box, std::size_t nx, std::size_t ny);

    const Box& box() const { return box_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }

    double dx() const { return (box_.re_max - box_.re_min) / double(nx_); }
    double dy() const { return (box_.im_max - box_.im_min) / double(ny_); }
    double cell_diag() const;

    cplx center(std::size_t ix, std::size_t iy) const;
    bool get(std::size_t ix, std::size_t iy) const { return mask_[iy * nx_ + ix] != 0; }
    void set(std::size_t ix, std::size_t iy, bool v) { mask_[iy * nx_ + ix] = v ? 1 : 0; }

    /// Membership of the cell containing z (false outside the box).
    bool contains(cplx z) const;

    std::size_t count() const;
    bool any() const { return count() > 0; }
    bool same_grid(const Raster& other) const;

    std::vector<std::uint8_t>& raw() { return mask_; }
    const std::vector<std::uint8_t>& raw() const { return mask_; }

    /// Member cells with at least one non-member 4-neighbour (box edge counts
    /// as non-member).
    std::vector<cplx> boundary_points() const;

    std::string to_json() const;
    static Raster from_json(const std::string& text);

private:
    Box box_;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> mask_;
};

/// Cellwise conjunction; GridMismatch unless boxes and resolutions agree.
Raster raster_intersect(const Raster& a, const Raster& b);

/// Symmetric Hausdorff distance between the member cell-center point sets.
/// EmptyRegion if either raster has no member cell.
double hausdorff(const Raster& a, const Raster& b);

/// For every member cell of a, the distance to the nearest member cell
/// center of b (exact Euclidean distance transform).
double directed_hausdorff(const Raster& a, const Raster& b);

/// Rasterize the convex region described by a support function;
/// slack is added to the half-plane tests (one cell diagonal by default).
Raster raster_of_support(const SupportFn& s, const Box& box, std::size_t nx, std::size_t ny,
                         double slack);

std::string support_to_json(const SupportFn& s);
SupportFn support_from_json(const std::string& text);

}  // namespace pencilrange
