#include "monomap/svg.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "monomap/errors.hpp"
#include "monomap/functionals.hpp"

namespace monomap {

namespace {

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

struct Panel {
    Vec2 offset;     // svg position of the panel
    double px;       // panel size in svg units
    Box2 world;      // world box mapped onto the panel

    Vec2 to_svg(const Vec2& p) const {
        double w = std::max(world.hi.x - world.lo.x, 1e-30);
        double h = std::max(world.hi.y - world.lo.y, 1e-30);
        double s = px / std::max(w, h);
        // center the world box, flip y
        double cx = offset.x + 0.5 * px + (p.x - 0.5 * (world.lo.x + world.hi.x)) * s;
        double cy = offset.y + 0.5 * px - (p.y - 0.5 * (world.lo.y + world.hi.y)) * s;
        return {cx, cy};
    }
    double scale() const {
        double w = std::max(world.hi.x - world.lo.x, 1e-30);
        double h = std::max(world.hi.y - world.lo.y, 1e-30);
        return px / std::max(w, h);
    }
};

void draw_triangles(std::ostringstream& out, const Panel& panel, const TriangleMesh& mesh,
                    const std::vector<Vec2>& points, const std::vector<int>& sign) {
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        Vec2 a = panel.to_svg(points[tri[0]]);
        Vec2 b = panel.to_svg(points[tri[1]]);
        Vec2 c = panel.to_svg(points[tri[2]]);
        const char* fill = sign[t] > 0 ? "#d0e4f5" : (sign[t] < 0 ? "#e06666" : "#f6d45a");
        out << "<polygon points=\"" << num(a.x) << "," << num(a.y) << " " << num(b.x) << ","
            << num(b.y) << " " << num(c.x) << "," << num(c.y) << "\" fill=\"" << fill
            << "\" stroke=\"#40404f\" stroke-width=\"0.3\"/>\n";
    }
}

}  // namespace

std::string emit_svg(const DiscreteMap& map, const SvgOptions& options) {
    const TriangleMesh& mesh = *map.mesh;
    auto diffs = triangle_differentials(map);
    double max_abs = 0.0;
    for (const auto& d : diffs) max_abs = std::max(max_abs, std::abs(d.jacobian));
    const double tol = 1e-12 * std::max(1.0, max_abs);
    std::vector<int> sign(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t)
        sign[t] = std::abs(diffs[t].jacobian) <= tol ? 0 : (diffs[t].jacobian > 0.0 ? 1 : -1);

    const double px = options.panel_px;
    const double margin = 20.0;
    Panel source{{margin, margin}, px, mesh.bounding_box()};
    Panel image{{margin * 2 + px, margin}, px, map.image_box()};

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(2 * px + 3 * margin)
        << "\" height=\"" << num(px + 2 * margin + 18) << "\">\n";
    if (!options.title.empty())
        out << "<text x=\"" << num(margin) << "\" y=\"" << num(px + 2 * margin + 12)
            << "\" font-size=\"12\" font-family=\"monospace\">" << options.title << "</text>\n";
    draw_triangles(out, source, mesh, mesh.vertices, sign);
    draw_triangles(out, image, mesh, map.images, sign);
    if (options.fold_circle) {
        for (const Panel& panel : {source, image}) {
            Vec2 c = panel.to_svg({0, 0});
            out << "<circle cx=\"" << num(c.x) << "\" cy=\"" << num(c.y) << "\" r=\""
                << num(*options.fold_circle * panel.scale())
                << "\" fill=\"none\" stroke=\"#111111\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

void save_svg(const std::string& path, const DiscreteMap& map, const SvgOptions& options) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file", path);
    out << emit_svg(map, options);
}

}  // namespace monomap
