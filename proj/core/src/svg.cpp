#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "icp/errors.hpp"
#include "icp/layout.hpp"

namespace icp {

namespace {

class SvgWriter {
public:
    SvgWriter(double x0, double y1, double scale, int precision) : x0_(x0), y1_(y1), scale_(scale), prec_(precision) {}

    std::string num(double v) const
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", prec_, v);
        std::string s = buf;
        if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s = "0";
        return s;
    }
    std::string x(double v) const { return num((v - x0_) * scale_); }
    std::string y(double v) const { return num((y1_ - v) * scale_); }
    std::string len(double v) const { return num(v * scale_); }

private:
    double x0_, y1_, scale_;
    int prec_;
};

}  // namespace

std::string to_svg(const Layout& layout, const PlanarMap& map, const SvgOptions& opts)
{
    double lo_x = -1.0, hi_x = 1.0, lo_y = -1.0, hi_y = 1.0;
    if (layout.frame == Frame::Plane && !layout.center.empty()) {
        lo_x = lo_y = std::numeric_limits<double>::infinity();
        hi_x = hi_y = -lo_x;
        for (std::size_t v = 0; v < layout.center.size(); ++v) {
            const Point z = layout.center[v];
            const double r = layout.radius[v];
            lo_x = std::min(lo_x, z.real() - r);
            hi_x = std::max(hi_x, z.real() + r);
            lo_y = std::min(lo_y, z.imag() - r);
            hi_y = std::max(hi_y, z.imag() + r);
        }
    }
    const double pad = 0.02 * std::max(hi_x - lo_x, hi_y - lo_y);
    lo_x -= pad;
    hi_x += pad;
    lo_y -= pad;
    hi_y += pad;
    const double extent = std::max(hi_x - lo_x, hi_y - lo_y);
    const double scale = opts.size_px / extent;
    SvgWriter w(lo_x, hi_y, scale, opts.precision);
    const std::string width = w.num((hi_x - lo_x) * scale);
    const std::string height = w.num((hi_y - lo_y) * scale);

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + width + "\" height=\"" + height +
           "\" viewBox=\"0 0 " + width + " " + height + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + width + "\" height=\"" + height + "\" fill=\"white\"/>\n";
    if (layout.frame == Frame::UnitDisk)
        out += "<circle class=\"frame\" cx=\"" + w.x(0.0) + "\" cy=\"" + w.y(0.0) + "\" r=\"" + w.len(1.0) +
               "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    const std::string stroke_w = w.num(std::max(0.2, 0.001 * opts.size_px));
    out += "<g fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"" + stroke_w + "\">\n";
    for (std::size_t v = 0; v < layout.center.size(); ++v)
        out += "<circle cx=\"" + w.x(layout.center[v].real()) + "\" cy=\"" + w.y(layout.center[v].imag()) + "\" r=\"" +
               w.len(layout.radius[v]) + "\"/>\n";
    out += "</g>\n";

    if (opts.draw_edges && layout.center.size() == static_cast<std::size_t>(map.vertex_count())) {
        out += "<g stroke=\"#888888\" stroke-width=\"" + stroke_w + "\">\n";
        for (EdgeId e = 0; e < map.edge_count(); ++e) {
            auto [a, b] = map.edge(e);
            out += "<line x1=\"" + w.x(layout.center[a].real()) + "\" y1=\"" + w.y(layout.center[a].imag()) + "\" x2=\"" +
                   w.x(layout.center[b].real()) + "\" y2=\"" + w.y(layout.center[b].imag()) + "\"/>\n";
        }
        out += "</g>\n";
    }
    if (opts.draw_dual_points && !layout.dual_point.empty()) {
        out += "<g fill=\"#c0392b\">\n";
        const std::string dot = w.num(std::max(0.5, 0.002 * opts.size_px));
        for (Point p : layout.dual_point)
            out += "<circle cx=\"" + w.x(p.real()) + "\" cy=\"" + w.y(p.imag()) + "\" r=\"" + dot + "\"/>\n";
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

void export_svg(const Layout& layout, const PlanarMap& map, const std::filesystem::path& path, const SvgOptions& opts)
{
    const std::string doc = to_svg(layout, map, opts);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    os << doc;
    if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace icp
