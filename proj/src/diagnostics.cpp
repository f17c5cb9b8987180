#include "monomap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "monomap/errors.hpp"
#include "monomap/functionals.hpp"

namespace monomap {

namespace {

struct TriBox {
    Box2 box;
    Vec2 p[3];
};

std::vector<TriBox> image_triangle_boxes(const DiscreteMap& map) {
    const TriangleMesh& mesh = *map.mesh;
    std::vector<TriBox> boxes(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        for (int k = 0; k < 3; ++k) {
            boxes[t].p[k] = map.images[mesh.triangles[t][k]];
            boxes[t].box.expand(boxes[t].p[k]);
        }
    }
    return boxes;
}

// Uniform hash grid over image-space boxes.
class GridIndex {
public:
    GridIndex(const std::vector<TriBox>& boxes, double cell) : cell_(cell) {
        for (int t = 0; t < static_cast<int>(boxes.size()); ++t) insert(boxes[t].box, t);
    }

    template <typename F>
    void for_candidates(const Box2& query, double pad, F&& f) const {
        auto [ix0, iy0] = key(query.lo - Vec2{pad, pad});
        auto [ix1, iy1] = key(query.hi + Vec2{pad, pad});
        for (long ix = ix0; ix <= ix1; ++ix)
            for (long iy = iy0; iy <= iy1; ++iy) {
                auto it = cells_.find(hash(ix, iy));
                if (it == cells_.end()) continue;
                for (int t : it->second) f(t);
            }
    }

private:
    std::pair<long, long> key(const Vec2& p) const {
        return {static_cast<long>(std::floor(p.x / cell_)), static_cast<long>(std::floor(p.y / cell_))};
    }
    static long long hash(long ix, long iy) { return (static_cast<long long>(ix) << 28) ^ iy; }
    void insert(const Box2& box, int id) {
        auto [ix0, iy0] = key(box.lo);
        auto [ix1, iy1] = key(box.hi);
        for (long ix = ix0; ix <= ix1; ++ix)
            for (long iy = iy0; iy <= iy1; ++iy) cells_[hash(ix, iy)].push_back(id);
    }
    double cell_;
    std::unordered_map<long long, std::vector<int>> cells_;
};

double point_triangle_dist(const Vec2& q, const Vec2 p[3]) {
    double o0 = (p[1] - p[0]).cross(q - p[0]);
    double o1 = (p[2] - p[1]).cross(q - p[1]);
    double o2 = (p[0] - p[2]).cross(q - p[2]);
    if (o0 >= 0.0 && o1 >= 0.0 && o2 >= 0.0) return 0.0;  // inside a CCW triangle
    double d2 = std::min({point_segment_dist2(q, p[0], p[1]), point_segment_dist2(q, p[1], p[2]),
                          point_segment_dist2(q, p[2], p[0])});
    return std::sqrt(d2);
}

bool strictly_inside(const Vec2& q, const Vec2 p[3], double eps_area) {
    double o0 = (p[1] - p[0]).cross(q - p[0]);
    double o1 = (p[2] - p[1]).cross(q - p[1]);
    double o2 = (p[0] - p[2]).cross(q - p[2]);
    return o0 > eps_area && o1 > eps_area && o2 > eps_area;
}

bool proper_crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double eps_area) {
    double d1 = (d - c).cross(a - c);
    double d2 = (d - c).cross(b - c);
    double d3 = (b - a).cross(c - a);
    double d4 = (b - a).cross(d - a);
    bool ab = (d1 > eps_area && d2 < -eps_area) || (d1 < -eps_area && d2 > eps_area);
    bool cd = (d3 > eps_area && d4 < -eps_area) || (d3 < -eps_area && d4 > eps_area);
    return ab && cd;
}

bool triangles_overlap(const Vec2 a[3], const Vec2 b[3], double eps_area) {
    for (int i = 0; i < 3; ++i) {
        if (strictly_inside(a[i], b, eps_area)) return true;
        if (strictly_inside(b[i], a, eps_area)) return true;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (proper_crossing(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3], eps_area)) return true;
    return false;
}

}  // namespace

MonotonicityReport check_monotone_fibers(const DiscreteMap& map,
                                         const PolygonalDomain& target,
                                         int sample_grid,
                                         double delta) {
    if (sample_grid < 2) throw InvalidArgument("sample grid must be at least 2");
    const TriangleMesh& mesh = *map.mesh;
    auto boxes = image_triangle_boxes(map);

    double max_diam = 0.0;
    for (const auto& tb : boxes) max_diam = std::max(max_diam, tb.box.diagonal());
    if (delta <= 0.0) delta = 2.0 * max_diam;
    if (delta < max_diam)
        throw InvalidArgument("fiber radius below the image resolution of the mesh");

    Box2 span = target.bounding_box();
    for (const auto& tb : boxes) span.expand(tb.box);

    GridIndex index(boxes, std::max(delta, 1e-12 + max_diam));

    MonotonicityReport report;
    report.delta = delta;
    report.pass = true;

    std::vector<int> fiber;
    std::vector<char> in_fiber(mesh.triangle_count(), 0), seen(mesh.triangle_count(), 0);
    for (int j = 0; j < sample_grid; ++j) {
        for (int i = 0; i < sample_grid; ++i) {
            Vec2 b{span.lo.x + (span.hi.x - span.lo.x) * (i + 0.5) / sample_grid,
                   span.lo.y + (span.hi.y - span.lo.y) * (j + 0.5) / sample_grid};
            fiber.clear();
            Box2 query;
            query.expand(b);
            index.for_candidates(query, delta, [&](int t) {
                if (!in_fiber[t] && point_triangle_dist(b, boxes[t].p) <= delta) {
                    in_fiber[t] = 1;
                    fiber.push_back(t);
                }
            });
            int components = 0;
            for (int start : fiber) {
                if (seen[start]) continue;
                ++components;
                std::vector<int> stack{start};
                seen[start] = 1;
                while (!stack.empty()) {
                    int t = stack.back();
                    stack.pop_back();
                    for (int nb : mesh.tri_neighbors[t])
                        if (nb >= 0 && in_fiber[nb] && !seen[nb]) {
                            seen[nb] = 1;
                            stack.push_back(nb);
                        }
                }
            }
            for (int t : fiber) in_fiber[t] = seen[t] = 0;
            report.sampled_points.push_back(b);
            report.fiber_component_counts.push_back(components);
            if (components > 1) {
                report.pass = false;
                report.failing_points.push_back(b);
            }
        }
    }
    return report;
}

OrientationCensus check_orientation(const DiscreteMap& map) {
    auto diffs = triangle_differentials(map);
    double max_abs = 0.0;
    for (const auto& d : diffs) max_abs = std::max(max_abs, std::abs(d.jacobian));
    OrientationCensus census;
    census.tolerance = 1e-12 * std::max(1.0, max_abs);
    for (std::size_t t = 0; t < diffs.size(); ++t) {
        double j = diffs[t].jacobian;
        if (std::abs(j) <= census.tolerance) {
            ++census.zero;
            census.zero_triangles.push_back(static_cast<int>(t));
        } else if (j > 0.0) {
            ++census.positive;
        } else {
            ++census.negative;
            census.negative_triangles.push_back(static_cast<int>(t));
        }
    }
    return census;
}

InjectivityReport check_injectivity(const DiscreteMap& map) {
    const TriangleMesh& mesh = *map.mesh;
    InjectivityReport report;
    report.census = check_orientation(map);

    auto boxes = image_triangle_boxes(map);
    double avg_diam = 0.0;
    for (const auto& tb : boxes) avg_diam += tb.box.diagonal();
    avg_diam = boxes.empty() ? 1.0 : avg_diam / boxes.size();
    double scale = std::max(map.image_scale(), 1e-30);
    const double eps_area = 1e-12 * scale * scale;

    GridIndex index(boxes, std::max(avg_diam, 1e-9 * scale));
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        index.for_candidates(boxes[t].box, 0.0, [&](int s) {
            if (s <= t) return;
            if (!boxes[t].box.intersects(boxes[s].box)) return;
            const auto& other = mesh.triangles[s];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (tri[a] == other[b]) return;  // adjacent triangles may touch
            if (triangles_overlap(boxes[t].p, boxes[s].p, eps_area))
                report.overlap_witnesses.emplace_back(t, s);
        });
    }
    std::sort(report.overlap_witnesses.begin(), report.overlap_witnesses.end());
    report.overlap_witnesses.erase(
        std::unique(report.overlap_witnesses.begin(), report.overlap_witnesses.end()),
        report.overlap_witnesses.end());
    report.injective = report.census.negative == 0 && report.census.zero == 0 &&
                       report.overlap_witnesses.empty();
    return report;
}

ModulusReport modulus_of_continuity_bound(const DiscreteMap& map,
                                          std::span<const std::pair<int, int>> pairs,
                                          double constant_c) {
    if (!(constant_c > 0.0)) throw InvalidArgument("modulus constant must be positive");
    ModulusReport report;
    report.dirichlet_energy = energy_iso(map, 2.0).total;
    const TriangleMesh& mesh = *map.mesh;
    for (auto [a, b] : pairs) {
        if (a < 0 || a >= mesh.vertex_count() || b < 0 || b >= mesh.vertex_count())
            throw InvalidArgument("modulus pair vertex out of range");
        ModulusPairMargin margin;
        margin.a = a;
        margin.b = b;
        double d = dist(mesh.vertices[a], mesh.vertices[b]);
        if (d == 0.0) {
            margin.skipped = true;  // coincident pair carries no information
            report.pairs.push_back(margin);
            continue;
        }
        double log_term = std::log(std::exp(1.0) + 1.0 / d);
        margin.lhs = (map.images[a] - map.images[b]).norm2();
        margin.rhs = constant_c * report.dirichlet_energy / log_term;
        margin.ratio = margin.lhs == 0.0 ? 0.0
                       : margin.rhs > 0.0 ? margin.lhs / margin.rhs
                                          : std::numeric_limits<double>::infinity();
        report.max_ratio = std::max(report.max_ratio, margin.ratio);
        if (report.dirichlet_energy > 0.0)
            report.fitted_c = std::max(report.fitted_c, margin.lhs * log_term / report.dirichlet_energy);
        report.pairs.push_back(margin);
    }
    return report;
}

}  // namespace monomap
