#pragma once

#include <span>
#include <vector>

#include "monomap/domain.hpp"

namespace monomap {

// Axis-aligned square cell of a target cover. Boundary cells carry the arc of
// the target boundary they meet (their external face) and the axis direction
// in which the square is extended when pre-cells are computed.
struct Cell {
    enum class Kind { internal, boundary };

    Vec2 center;
    double half_width = 0.0;
    Kind kind = Kind::internal;
    std::vector<Vec2> external_face;  // domain-oriented polyline, empty for internal cells
    int face_loop = -1;               // target loop the face lies on
    Vec2 extension_dir{0.0, 0.0};     // unit axis direction, boundary cells only
    std::vector<Vec2> region;         // cell intersected with the target, counterclockwise
    double epsilon = 0.0;             // diameter bound of the owning cover

    double side() const { return 2.0 * half_width; }
    double diameter() const { return side() * std::sqrt(2.0); }
    Box2 box() const {
        Box2 b;
        b.expand(center - Vec2{half_width, half_width});
        b.expand(center + Vec2{half_width, half_width});
        return b;
    }
    // The square extended past the external face by one half-width.
    Box2 extended_box() const {
        Box2 b = box();
        b.expand(center + extension_dir * (2.0 * half_width));
        return b;
    }
};

struct CellCover {
    std::vector<Cell> cells;  // row-major over the brick layout
    double epsilon = 0.0;
    double side = 0.0;         // realized square side (refined below epsilon when needed)
    int multiplicity = 0;      // verified maximum closed-square overlap
};

struct CoverConfig {
    double overlap_fraction = 0.25;  // must stay below 1/3 for the multiplicity bound
    int max_cells = 20000;
    int build_sample_grid = 200;
};

// Brick-offset rows of overlapping squares with diameters below epsilon.
// Squares are refined globally until every boundary cell meets the target
// boundary in a single arc; the verified multiplicity never exceeds 3.
CellCover build_cell_cover(const PolygonalDomain& target, double epsilon,
                           const CoverConfig& config = {});

struct CoverVerification {
    bool pass = false;
    bool coverage_ok = false;
    int coverage_misses = 0;
    std::vector<Vec2> miss_points;
    bool multiplicity_ok = false;
    int max_multiplicity = 0;
    std::vector<int> multiplicity_histogram;  // index = overlap count
    bool diameter_ok = false;
    double max_diameter = 0.0;
};

// Checks coverage, the multiplicity bound and the diameter bound on a
// sampling grid plus any caller-supplied points. Failures are data, not errors.
CoverVerification verify_cover(const CellCover& cover, const PolygonalDomain& target,
                               std::span<const Vec2> sample_points = {},
                               int sample_grid = 200);

}  // namespace monomap
