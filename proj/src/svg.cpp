#include "pencilrange/svg.hpp"

#include <charconv>
#include <cmath>

namespace pencilrange {

SvgLayer SvgLayer::fill(Raster r, std::string color) {
    SvgLayer l;
    l.kind = Kind::RasterFill;
    l.raster = std::move(r);
    l.color = std::move(color);
    return l;
}

SvgLayer SvgLayer::curve(std::vector<cplx> pts, std::string color) {
    SvgLayer l;
    l.kind = Kind::Curve;
    l.pts = std::move(pts);
    l.color = std::move(color);
    return l;
}

SvgLayer SvgLayer::points(std::vector<cplx> pts, std::string color, double radius) {
    SvgLayer l;
    l.kind = Kind::Points;
    l.pts = std::move(pts);
    l.color = std::move(color);
    l.point_radius = radius;
    return l;
}

namespace {

// locale-independent fixed formatting
std::string fmt(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string emit_svg(const std::vector<SvgLayer>& layers, const Box& box, std::size_t width_px,
                     std::size_t height_px) {
    if (!box.valid()) throw InvalidSpec("emit_svg: degenerate box");
    const double w = double(width_px), h = double(height_px);
    const double sx = w / (box.re_max - box.re_min);
    const double sy = h / (box.im_max - box.im_min);
    auto px = [&](double re) { return (re - box.re_min) * sx; };
    auto py = [&](double im) { return h - (im - box.im_min) * sy; };  // y grows downward

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_px) +
           "\" height=\"" + std::to_string(height_px) + "\" viewBox=\"0 0 " +
           std::to_string(width_px) + " " + std::to_string(height_px) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_px) + "\" height=\"" +
           std::to_string(height_px) + "\" fill=\"#ffffff\"/>\n";

    for (const SvgLayer& layer : layers) {
        switch (layer.kind) {
            case SvgLayer::Kind::RasterFill: {
                const Raster& r = layer.raster;
                if (r.nx() == 0) break;
                out += "<g fill=\"" + layer.color + "\" stroke=\"none\">\n";
                // merge horizontal runs per row
                for (std::size_t iy = 0; iy < r.ny(); ++iy) {
                    std::size_t ix = 0;
                    while (ix < r.nx()) {
                        if (!r.get(ix, iy)) {
                            ++ix;
                            continue;
                        }
                        std::size_t run = ix;
                        while (run < r.nx() && r.get(run, iy)) ++run;
                        const double x0 = px(r.box().re_min + double(ix) * r.dx());
                        const double x1 = px(r.box().re_min + double(run) * r.dx());
                        const double y0 = py(r.box().im_min + double(iy + 1) * r.dy());
                        const double y1 = py(r.box().im_min + double(iy) * r.dy());
                        out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" +
                               fmt(x1 - x0) + "\" height=\"" + fmt(y1 - y0) + "\"/>\n";
                        ix = run;
                    }
                }
                out += "</g>\n";
                break;
            }
            case SvgLayer::Kind::Curve: {
                if (layer.pts.empty()) break;
                out += "<polyline fill=\"none\" stroke=\"" + layer.color +
                       "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t k = 0; k < layer.pts.size(); ++k) {
                    if (k) out += " ";
                    out += fmt(px(layer.pts[k].real())) + "," + fmt(py(layer.pts[k].imag()));
                }
                out += "\"/>\n";
                break;
            }
            case SvgLayer::Kind::Points: {
                out += "<g fill=\"" + layer.color + "\" stroke=\"none\">\n";
                for (const cplx p : layer.pts) {
                    out += "<circle cx=\"" + fmt(px(p.real())) + "\" cy=\"" + fmt(py(p.imag())) +
                           "\" r=\"" + fmt(layer.point_radius) + "\"/>\n";
                }
                out += "</g>\n";
                break;
            }
        }
    }

    // axes (drawn above the layers) and frame
    out += "<g stroke=\"#444444\" stroke-width=\"1\">\n";
    if (box.re_min < 0.0 && box.re_max > 0.0)
        out += "<line x1=\"" + fmt(px(0)) + "\" y1=\"0\" x2=\"" + fmt(px(0)) + "\" y2=\"" +
               fmt(h) + "\"/>\n";
    if (box.im_min < 0.0 && box.im_max > 0.0)
        out += "<line x1=\"0\" y1=\"" + fmt(py(0)) + "\" x2=\"" + fmt(w) + "\" y2=\"" +
               fmt(py(0)) + "\"/>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_px) + "\" height=\"" +
           std::to_string(height_px) + "\" fill=\"none\"/>\n";
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace pencilrange
