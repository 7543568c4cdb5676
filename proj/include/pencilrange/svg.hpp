#pragma once

#include <string>
#include <vector>

#include "pencilrange/region.hpp"

namespace pencilrange {

/// One drawable layer of a complex-plane figure.
struct SvgLayer {
    enum class Kind { RasterFill, Curve, Points };
    Kind kind = Kind::Points;
    Raster raster;           // RasterFill
    std::vector<cplx> pts;   // Curve (polyline) or Points (circles)
    std::string color = "#000000";
    double point_radius = 2.0;  // pixels

    static SvgLayer fill(Raster r, std::string color);
    static SvgLayer curve(std::vector<cplx> pts, std::string color);
    static SvgLayer points(std::vector<cplx> pts, std::string color, double radius = 2.0);
};

/// Deterministic SVG document: fixed header, layers in order, axes on top,
/// 6-decimal coordinates; byte-identical across runs for identical inputs.
std::string emit_svg(const std::vector<SvgLayer>& layers, const Box& box,
                     std::size_t width_px = 640, std::size_t height_px = 640);

}  // namespace pencilrange
