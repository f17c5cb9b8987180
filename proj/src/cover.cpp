#include "monomap/cover.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

namespace {

bool clip_segment(const Vec2& a, const Vec2& b, const Box2& box, double& t0, double& t1) {
    // Liang-Barsky against the closed box.
    t0 = 0.0;
    t1 = 1.0;
    Vec2 d = b - a;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {a.x - box.lo.x, box.hi.x - a.x, a.y - box.lo.y, box.hi.y - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
        } else {
            double t = q[k] / p[k];
            if (p[k] < 0.0) {
                if (t > t1) return false;
                if (t > t0) t0 = t;
            } else {
                if (t < t0) return false;
                if (t < t1) t1 = t;
            }
        }
    }
    return t0 <= t1;
}

struct BoundaryArcs {
    std::vector<std::vector<Vec2>> runs;  // domain-oriented polylines inside the square
    std::vector<int> run_loops;
    bool full_loop = false;
};

// Maximal runs of each target loop inside the closed square.
BoundaryArcs boundary_arcs_in_square(const PolygonalDomain& target, const Box2& box, double tol) {
    BoundaryArcs arcs;
    for (int li = 0; li < target.loop_count(); ++li) {
        const auto& loop = target.loop(li);
        const std::size_t n = loop.size();
        std::vector<std::vector<Vec2>> runs;
        std::optional<std::vector<Vec2>> current;
        bool first_edge_starts_inside = false;
        bool broke_somewhere = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = loop[i];
            const Vec2& b = loop[(i + 1) % n];
            double t0, t1;
            bool present = clip_segment(a, b, box, t0, t1) && (t1 - t0) * dist(a, b) > 0.0;
            if (!present) {
                if (current) {
                    runs.push_back(std::move(*current));
                    current.reset();
                }
                broke_somewhere = true;
                continue;
            }
            Vec2 entry = a + (b - a) * t0;
            Vec2 exit = a + (b - a) * t1;
            bool starts_fresh = t0 > 0.0 && dist(entry, a) > tol;
            if (starts_fresh && current) {
                runs.push_back(std::move(*current));
                current.reset();
                broke_somewhere = true;
            }
            if (!current) {
                current = std::vector<Vec2>{entry};
                if (i == 0 && !starts_fresh) first_edge_starts_inside = true;
            }
            if (dist(current->back(), exit) > tol) current->push_back(exit);
            bool ends_early = t1 < 1.0 && dist(exit, b) > tol;
            if (ends_early) {
                runs.push_back(std::move(*current));
                current.reset();
                broke_somewhere = true;
            }
        }
        if (current) {
            if (!broke_somewhere) {
                arcs.full_loop = true;  // the whole loop lies inside the square
                runs.push_back(std::move(*current));
            } else if (first_edge_starts_inside && !runs.empty()) {
                // Cyclic wrap: the open run continues into the first one.
                auto& first = runs.front();
                current->insert(current->end(), first.begin() + (dist(current->back(), first.front()) <= tol ? 1 : 0),
                                first.end());
                first = std::move(*current);
            } else {
                runs.push_back(std::move(*current));
            }
        }
        for (auto& run : runs) {
            double len = 0.0;
            for (std::size_t i = 0; i + 1 < run.size(); ++i) len += dist(run[i], run[i + 1]);
            if (len > tol) {  // a touch point is not a face
                arcs.runs.push_back(std::move(run));
                arcs.run_loops.push_back(li);
            }
        }
    }
    return arcs;
}

// Square perimeter parameter of a point assumed on (or near) the box boundary.
double square_perimeter_param(const Box2& box, const Vec2& p) {
    double w = box.hi.x - box.lo.x, h = box.hi.y - box.lo.y;
    double d_bottom = std::abs(p.y - box.lo.y);
    double d_right = std::abs(p.x - box.hi.x);
    double d_top = std::abs(p.y - box.hi.y);
    double d_left = std::abs(p.x - box.lo.x);
    double m = std::min({d_bottom, d_right, d_top, d_left});
    if (m == d_bottom) return std::clamp(p.x - box.lo.x, 0.0, w);
    if (m == d_right) return w + std::clamp(p.y - box.lo.y, 0.0, h);
    if (m == d_top) return w + h + std::clamp(box.hi.x - p.x, 0.0, w);
    return 2.0 * w + h + std::clamp(box.hi.y - p.y, 0.0, h);
}

Vec2 square_perimeter_point(const Box2& box, double s) {
    double w = box.hi.x - box.lo.x, h = box.hi.y - box.lo.y;
    double per = 2.0 * (w + h);
    s = std::fmod(s, per);
    if (s < 0.0) s += per;
    if (s <= w) return {box.lo.x + s, box.lo.y};
    s -= w;
    if (s <= h) return {box.hi.x, box.lo.y + s};
    s -= h;
    if (s <= w) return {box.hi.x - s, box.hi.y};
    s -= w;
    return {box.lo.x, box.hi.y - s};
}

// Counterclockwise square arc from parameter s0 to s1, corners included.
std::vector<Vec2> square_arc(const Box2& box, double s0, double s1, double tol) {
    double w = box.hi.x - box.lo.x, h = box.hi.y - box.lo.y;
    double per = 2.0 * (w + h);
    double span = s1 - s0;
    span = std::fmod(span, per);
    if (span < 0.0) span += per;
    std::vector<Vec2> arc;
    const double corners[4] = {w, w + h, 2.0 * w + h, per};
    double walked = 0.0;
    double s = s0;
    while (true) {
        // distance to the next corner ahead of s
        double in_side = std::fmod(s, per);
        if (in_side < 0.0) in_side += per;
        double next = per;
        for (double c : corners)
            if (c > in_side + tol) {
                next = c;
                break;
            }
        double step = next - in_side;
        if (walked + step >= span) {
            arc.push_back(square_perimeter_point(box, s0 + span));
            break;
        }
        walked += step;
        s = s0 + walked;
        arc.push_back(square_perimeter_point(box, s));
    }
    return arc;
}

Vec2 snap_to_axis(const Vec2& v) {
    if (std::abs(v.x) >= std::abs(v.y)) return {v.x >= 0.0 ? 1.0 : -1.0, 0.0};
    return {0.0, v.y >= 0.0 ? 1.0 : -1.0};
}

// Attempt to classify one candidate square. Returns false when the square
// violates the single-arc requirement and the cover must refine.
bool classify_square(const PolygonalDomain& target, const Vec2& center, double half,
                     double epsilon, std::optional<Cell>& out) {
    out.reset();
    Cell cell;
    cell.center = center;
    cell.half_width = half;
    cell.epsilon = epsilon;
    Box2 box = cell.box();
    const double tol = 1e-9 * cell.side();

    BoundaryArcs arcs = boundary_arcs_in_square(target, box, tol);
    if (arcs.full_loop) return false;
    if (arcs.runs.size() > 1) return false;

    if (arcs.runs.empty()) {
        if (!target.contains(center)) return true;  // fully outside: drop, no violation
        cell.kind = Cell::Kind::internal;
        cell.region = {box.lo, {box.hi.x, box.lo.y}, box.hi, {box.lo.x, box.hi.y}};
        out = std::move(cell);
        return true;
    }

    // One arc: boundary cell. Its replacement region is the extension of the
    // square past the external face, clipped to the target; the face is the
    // target-boundary arc inside that extended box.
    cell.kind = Cell::Kind::boundary;
    Vec2 normal_sum{0, 0};
    {
        const auto& square_run = arcs.runs.front();
        for (std::size_t i = 0; i + 1 < square_run.size(); ++i) {
            Vec2 d = square_run[i + 1] - square_run[i];
            normal_sum += Vec2{d.y, -d.x};  // outward of the target (interior on the left)
        }
    }
    cell.extension_dir = snap_to_axis(normal_sum);

    Box2 ext = cell.extended_box();
    BoundaryArcs ext_arcs = boundary_arcs_in_square(target, ext, tol);
    if (ext_arcs.full_loop || ext_arcs.runs.size() != 1) return false;
    const auto& run = ext_arcs.runs.front();
    cell.external_face = run;
    cell.face_loop = ext_arcs.run_loops.front();

    // Region polygon: the face (domain oriented, interior on the left)
    // closed counterclockwise along the extended box.
    double s_end = square_perimeter_param(ext, run.back());
    double s_start = square_perimeter_param(ext, run.front());
    std::vector<Vec2> region = run;
    for (const Vec2& q : square_arc(ext, s_end, s_start, tol))
        if (dist(region.back(), q) > tol) region.push_back(q);
    while (region.size() > 1 && dist(region.front(), region.back()) <= tol) region.pop_back();
    if (region.size() < 3) return true;  // grazing contact only: drop

    double area = polygon_signed_area(region);
    if (std::abs(area) <= tol * tol) return true;  // zero-width sliver: drop
    if (area < 0.0) {
        // The kept side of the face is the other box arc.
        std::vector<Vec2> flipped(run.rbegin(), run.rend());
        for (const Vec2& q : square_arc(ext, s_start, s_end, tol))
            if (dist(flipped.back(), q) > tol) flipped.push_back(q);
        while (flipped.size() > 1 && dist(flipped.front(), flipped.back()) <= tol) flipped.pop_back();
        if (flipped.size() < 3 || polygon_signed_area(flipped) <= 0.0) return false;
        region = std::move(flipped);
    }
    cell.region = std::move(region);
    out = std::move(cell);
    return true;
}

}  // namespace

CellCover build_cell_cover(const PolygonalDomain& target, double epsilon,
                           const CoverConfig& config) {
    if (!(epsilon > 0.0)) throw InvalidArgument("cover epsilon must be positive");
    if (!(config.overlap_fraction > 0.0) || !(config.overlap_fraction < 1.0 / 3.0))
        throw InvalidArgument("overlap fraction must lie in (0, 1/3) for the multiplicity bound");

    const Box2 bbox = target.bounding_box();
    double side = 0.99 * epsilon / std::sqrt(2.0);          // diameter strictly below epsilon
    side = std::min(side, 0.99 * bbox.diagonal());          // degenerate large-epsilon case

    CellCover cover;
    cover.epsilon = epsilon;

    for (;;) {
        const double pitch = side * (1.0 - config.overlap_fraction);
        const long cols = static_cast<long>(std::ceil((bbox.hi.x - bbox.lo.x + side) / pitch)) + 1;
        const long rows = static_cast<long>(std::ceil((bbox.hi.y - bbox.lo.y + side) / pitch)) + 1;
        if (cols * rows > config.max_cells)
            throw ResourceError("cell cover would exceed the cap of " +
                                std::to_string(config.max_cells) +
                                " cells before resolving the target boundary");

        std::vector<Cell> cells;
        bool violated = false;
        for (long row = 0; row < rows && !violated; ++row) {
            double y = bbox.lo.y - side * 0.5 + row * pitch;
            double stagger = (row % 2 == 0) ? 0.0 : 0.5 * pitch;
            for (long col = 0; col < cols; ++col) {
                double x = bbox.lo.x - side * 0.5 + col * pitch + stagger;
                std::optional<Cell> cell;
                if (!classify_square(target, Vec2{x + side * 0.5, y + side * 0.5}, side * 0.5,
                                     epsilon, cell)) {
                    violated = true;
                    break;
                }
                if (cell) cells.push_back(std::move(*cell));
            }
        }
        if (!violated) {
            if (static_cast<int>(cells.size()) > config.max_cells)
                throw ResourceError("cell cover exceeds the cap of " +
                                    std::to_string(config.max_cells) + " cells");
            cover.cells = std::move(cells);
            cover.side = side;
            break;
        }
        side *= 0.5;
    }

    CoverVerification built = verify_cover(cover, target, {}, config.build_sample_grid);
    cover.multiplicity = built.max_multiplicity;
    if (!built.pass)
        throw ConsistencyError("generated cover failed its own verification (misses: " +
                               std::to_string(built.coverage_misses) +
                               ", max multiplicity: " + std::to_string(built.max_multiplicity) + ")");
    return cover;
}

CoverVerification verify_cover(const CellCover& cover, const PolygonalDomain& target,
                               std::span<const Vec2> sample_points, int sample_grid) {
    CoverVerification v;
    const Box2 bbox = target.bounding_box();
    const double tol = 1e-12 * std::max(1.0, bbox.diagonal());

    v.diameter_ok = true;
    for (const Cell& cell : cover.cells) {
        v.max_diameter = std::max(v.max_diameter, cell.diameter());
        if (!(cell.diameter() < cover.epsilon)) v.diameter_ok = false;
    }

    std::vector<Vec2> samples(sample_points.begin(), sample_points.end());
    for (int j = 0; j < sample_grid; ++j)
        for (int i = 0; i < sample_grid; ++i)
            samples.push_back({bbox.lo.x + (bbox.hi.x - bbox.lo.x) * (i + 0.5) / sample_grid,
                               bbox.lo.y + (bbox.hi.y - bbox.lo.y) * (j + 0.5) / sample_grid});

    v.coverage_ok = true;
    v.multiplicity_ok = true;
    for (const Vec2& p : samples) {
        if (!target.contains(p, tol)) continue;
        int count = 0;
        for (const Cell& cell : cover.cells)
            if (cell.box().contains(p, tol)) ++count;
        if (static_cast<int>(v.multiplicity_histogram.size()) <= count)
            v.multiplicity_histogram.resize(count + 1, 0);
        ++v.multiplicity_histogram[count];
        v.max_multiplicity = std::max(v.max_multiplicity, count);
        if (count == 0) {
            v.coverage_ok = false;
            ++v.coverage_misses;
            if (v.miss_points.size() < 32) v.miss_points.push_back(p);
        }
        if (count > 3) v.multiplicity_ok = false;
    }
    v.pass = v.coverage_ok && v.multiplicity_ok && v.diameter_ok;
    return v;
}

}  // namespace monomap
