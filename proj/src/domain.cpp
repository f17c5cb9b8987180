#include "monomap/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

double polygon_signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += poly[i].cross(poly[(i + 1) % n]);
    return 0.5 * a;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    // Even-odd crossing rule.
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

static double polyline_distance(const Vec2& p, const std::vector<Vec2>& poly) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_dist2(p, poly[i], poly[(i + 1) % n]));
    return std::sqrt(best);
}

PolygonalDomain::PolygonalDomain(std::vector<Vec2> outer_, std::vector<std::vector<Vec2>> holes_)
    : outer(std::move(outer_)), holes(std::move(holes_)) {
    if (outer.size() < 3) throw InvalidArgument("outer loop needs at least 3 points");
    if (polygon_signed_area(outer) <= 0.0)
        throw InvalidArgument("outer loop must be counterclockwise");
    for (std::size_t h = 0; h < holes.size(); ++h) {
        if (holes[h].size() < 3)
            throw InvalidArgument("hole " + std::to_string(h) + " needs at least 3 points");
        if (polygon_signed_area(holes[h]) >= 0.0)
            throw InvalidArgument("hole " + std::to_string(h) + " must be clockwise");
        for (const Vec2& p : holes[h])
            if (!point_in_polygon(p, outer))
                throw InvalidArgument("hole " + std::to_string(h) + " is not inside the outer loop");
    }
}

bool PolygonalDomain::contains(const Vec2& p, double tol) const {
    bool strict = point_in_polygon(p, outer);
    for (const auto& hole : holes)
        if (point_in_polygon(p, hole)) strict = false;
    if (strict) return true;
    return tol > 0.0 && distance_to_boundary(p) <= tol;
}

double PolygonalDomain::distance_to_boundary(const Vec2& p) const {
    double d = polyline_distance(p, outer);
    for (const auto& hole : holes) d = std::min(d, polyline_distance(p, hole));
    return d;
}

Box2 PolygonalDomain::bounding_box() const {
    Box2 box;
    for (const Vec2& p : outer) box.expand(p);
    return box;
}

double PolygonalDomain::area() const {
    double a = polygon_signed_area(outer);
    for (const auto& hole : holes) a += polygon_signed_area(hole);  // holes are negative
    return a;
}

PolygonalDomain make_rect_domain(double width, double height) {
    if (!(width > 0.0) || !(height > 0.0))
        throw InvalidArgument("rectangle dimensions must be positive");
    return PolygonalDomain({{0, 0}, {width, 0}, {width, height}, {0, height}});
}

PolygonalDomain make_annulus_domain(double r_inner, double r_outer, int segments) {
    if (!(r_inner > 0.0) || !(r_outer > r_inner))
        throw InvalidArgument("annulus needs 0 < r_inner < r_outer");
    if (segments < 3) throw InvalidArgument("segments must be at least 3");
    std::vector<Vec2> out, in;
    for (int j = 0; j < segments; ++j) {
        double theta = 2.0 * M_PI * j / segments;
        out.push_back({r_outer * std::cos(theta), r_outer * std::sin(theta)});
    }
    for (int j = segments - 1; j >= 0; --j) {  // clockwise
        double theta = 2.0 * M_PI * j / segments;
        in.push_back({r_inner * std::cos(theta), r_inner * std::sin(theta)});
    }
    return PolygonalDomain(std::move(out), {std::move(in)});
}

ClosedPolyline::ClosedPolyline(std::vector<Vec2> pts) : points(std::move(pts)) {
    if (points.size() < 3) throw InvalidArgument("closed polyline needs at least 3 points");
    cum_length.resize(points.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        cum_length[i] = acc;
        acc += dist(points[i], points[(i + 1) % points.size()]);
    }
    total_length = acc;
    if (!(total_length > 0.0)) throw InvalidArgument("closed polyline has zero length");
}

Vec2 ClosedPolyline::at(double t) const {
    t = std::fmod(t, total_length);
    if (t < 0.0) t += total_length;
    // Last segment whose start is <= t.
    auto it = std::upper_bound(cum_length.begin(), cum_length.end(), t);
    std::size_t i = static_cast<std::size_t>(it - cum_length.begin()) - 1;
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % points.size()];
    double seg = dist(a, b);
    double s = seg > 0.0 ? (t - cum_length[i]) / seg : 0.0;
    return a + (b - a) * s;
}

std::pair<double, double> ClosedPolyline::project(const Vec2& p) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points[i];
        const Vec2& b = points[(i + 1) % n];
        Vec2 d = b - a;
        double len2 = d.norm2();
        double s = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
        double d2 = (p - (a + d * s)).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_t = cum_length[i] + s * std::sqrt(len2);
        }
    }
    return {best_t, std::sqrt(best_d2)};
}

}  // namespace monomap
