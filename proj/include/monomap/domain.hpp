#pragma once

#include <vector>

#include "monomap/vec2.hpp"

namespace monomap {

// Planar polygonal domain: counterclockwise outer loop, clockwise holes.
struct PolygonalDomain {
    std::vector<Vec2> outer;
    std::vector<std::vector<Vec2>> holes;

    PolygonalDomain() = default;
    PolygonalDomain(std::vector<Vec2> outer_, std::vector<std::vector<Vec2>> holes_ = {});

    // Inside the outer loop and outside every hole; points within `tol` of
    // the boundary count as inside.
    bool contains(const Vec2& p, double tol = 0.0) const;
    double distance_to_boundary(const Vec2& p) const;

    int loop_count() const { return 1 + static_cast<int>(holes.size()); }
    // Loop 0 is the outer boundary, loop i>=1 is holes[i-1].
    const std::vector<Vec2>& loop(int i) const { return i == 0 ? outer : holes[i - 1]; }

    Box2 bounding_box() const;
    double diameter() const { return bounding_box().diagonal(); }
    double area() const;
};

double polygon_signed_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

PolygonalDomain make_rect_domain(double width, double height);
// Polygonal annulus; both circles sampled at `segments` equal angles.
PolygonalDomain make_annulus_domain(double r_inner, double r_outer, int segments);

// Closed polyline with arclength parametrization, used as a projection target.
struct ClosedPolyline {
    std::vector<Vec2> points;        // closed: edge i runs points[i] -> points[i+1 mod n]
    std::vector<double> cum_length;  // cum_length[i] = arclength up to points[i]
    double total_length = 0.0;

    explicit ClosedPolyline(std::vector<Vec2> pts);

    Vec2 at(double t) const;  // t taken mod total_length
    // Nearest point: returns (parameter, distance).
    std::pair<double, double> project(const Vec2& p) const;
    double signed_area() const { return polygon_signed_area(points); }
};

}  // namespace monomap
