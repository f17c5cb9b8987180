#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "monomap/diagnostics.hpp"
#include "monomap/errors.hpp"
#include "monomap/functionals.hpp"
#include "monomap/homeomorphize.hpp"
#include "monomap/oracle.hpp"

using namespace monomap;

namespace {

Cell internal_square_cell(Vec2 center, double half_width, double epsilon) {
    Cell cell;
    cell.center = center;
    cell.half_width = half_width;
    cell.kind = Cell::Kind::internal;
    cell.epsilon = epsilon;
    Box2 box = cell.box();
    cell.region = {box.lo, {box.hi.x, box.lo.y}, box.hi, {box.lo.x, box.hi.y}};
    return cell;
}

}  // namespace

TEST_CASE("internal pre-cell of the identity is exactly the contained triangles") {
    auto mesh = build_rect_mesh(1.0, 1.0, 8);
    DiscreteMap id = DiscreteMap::identity(mesh);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    // Grid-aligned square: membership is unambiguous.
    Cell cell = internal_square_cell({0.5, 0.5}, 0.25, 1.0);
    PreCell pre = compute_precell(id, cell, target);

    std::set<int> expected;
    Box2 box = cell.box();
    for (int t = 0; t < mesh->triangle_count(); ++t) {
        const auto& tri = mesh->triangles[t];
        bool inside = true;
        for (int k = 0; k < 3; ++k) inside = inside && box.contains(mesh->vertices[tri[k]], 1e-12);
        if (inside) expected.insert(t);
    }
    CHECK(std::set<int>(pre.triangles.begin(), pre.triangles.end()) == expected);
    CHECK(pre.triangles.size() == 32);  // the 4x4 block of quads
    CHECK_FALSE(pre.degenerate);
    REQUIRE(!pre.boundary_walk.empty());
    // The walk vertices all sit on the square boundary here.
    for (int v : pre.boundary_walk) {
        Vec2 q = mesh->vertices[v];
        double d = std::min({std::abs(q.x - 0.25), std::abs(q.x - 0.75), std::abs(q.y - 0.25),
                             std::abs(q.y - 0.75)});
        CHECK(d <= 1e-12);
    }
}

TEST_CASE("constant map pulls the whole mesh into one pre-cell") {
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    DiscreteMap constant(mesh, std::vector<Vec2>(mesh->vertex_count(), Vec2{0.5, 0.5}));
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({0.5, 0.5}, 0.2, 0.6);
    PreCell pre = compute_precell(constant, cell, target);
    CHECK(static_cast<int>(pre.triangles.size()) == mesh->triangle_count());
}

TEST_CASE("empty pre-cells are legal") {
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    DiscreteMap id = DiscreteMap::identity(mesh);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({3.0, 3.0}, 0.1, 0.3);
    PreCell pre = compute_precell(id, cell, target);
    CHECK(pre.triangles.empty());

    auto [unchanged, step] = replace_on_precell(id, pre, cell, target, 2.0, ChainConfig{});
    CHECK(step.skipped);
    for (int v = 0; v < mesh->vertex_count(); ++v)
        CHECK(unchanged.images[v] == id.images[v]);
}

TEST_CASE("boundary pre-cell of the nitsche map contains the collapsed collar sector") {
    AnnulusPair pair(0.5, 2.0);
    const int angular_n = 128;
    auto mesh = build_annulus_mesh(0.5, 2.0, 24, angular_n);
    DiscreteMap nitsche = sample_map_on_mesh(OracleMap::nitsche, mesh, pair);
    // A wide ring as the cover target keeps the cells large, so the face arcs
    // span several collar triangles; only the inner circle matters here.
    PolygonalDomain target = make_annulus_domain(1.0, 1.6, angular_n);

    CellCover cover = build_cell_cover(target, 0.6);
    // Pick the inner-circle cell whose face subtends the widest angle and
    // stays clear of the atan2 branch cut.
    const Cell* inner_cell = nullptr;
    double best_span = 0.0, a0 = 0.0, a1 = 0.0;
    for (const Cell& cell : cover.cells) {
        if (cell.kind != Cell::Kind::boundary || cell.face_loop != 1) continue;
        double lo = 1e9, hi = -1e9;
        for (const Vec2& q : cell.external_face) {
            double ang = std::atan2(q.y, q.x);
            lo = std::min(lo, ang);
            hi = std::max(hi, ang);
        }
        if (hi - lo > M_PI) continue;  // straddles the branch cut
        if (hi - lo > best_span) {
            best_span = hi - lo;
            a0 = lo;
            a1 = hi;
            inner_cell = &cell;
        }
    }
    REQUIRE(inner_cell != nullptr);
    REQUIRE(best_span > 0.2);

    PreCell pre = compute_precell(nitsche, *inner_cell, target);
    REQUIRE(!pre.triangles.empty());

    // Every collar triangle (all radii below 1) strictly inside the face's
    // angular range must belong to the pre-cell: the whole fiber over the
    // face arc collapses onto it, across every radial layer.
    std::set<int> members(pre.triangles.begin(), pre.triangles.end());
    int collar_checked = 0;
    const double margin = 0.06;
    for (int t = 0; t < mesh->triangle_count(); ++t) {
        const auto& tri = mesh->triangles[t];
        bool collar = true, in_angle = true;
        for (int k = 0; k < 3; ++k) {
            const Vec2& v = mesh->vertices[tri[k]];
            collar = collar && v.norm() <= 1.0 + 1e-12;
            double ang = std::atan2(v.y, v.x);
            in_angle = in_angle && ang > a0 + margin && ang < a1 - margin;
        }
        if (collar && in_angle) {
            ++collar_checked;
            CHECK(members.count(t) == 1);
        }
    }
    CHECK(collar_checked > 0);
}

TEST_CASE("repair leaves a homeomorphic trace unchanged") {
    Cell cell = internal_square_cell({0.5, 0.5}, 0.5, 1.5);
    // 16 points around the unit square, already in counterclockwise order.
    std::vector<Vec2> trace;
    ClosedPolyline curve(cell.region);
    const int n = 16;
    for (int i = 0; i < n; ++i) trace.push_back(curve.at(curve.total_length * i / n));
    std::vector<double> arclens(n, 1.0);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);

    TraceRepair repair = repair_boundary_trace(trace, arclens, cell, target);
    CHECK(repair.magnitude <= 1e-12);
    CHECK_FALSE(repair.redistributed);
    for (int i = 0; i < n; ++i) CHECK(dist(repair.values[i], trace[i]) <= 1e-12);
}

TEST_CASE("repair redistributes a fully collapsed trace") {
    Cell cell = internal_square_cell({0.5, 0.5}, 0.5, 1.5);
    const int n = 12;
    std::vector<Vec2> trace(n, Vec2{0.0, 0.0});  // everything at one corner
    std::vector<double> arclens(n, 0.5);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);

    TraceRepair repair = repair_boundary_trace(trace, arclens, cell, target);
    CHECK(repair.redistributed);
    CHECK(repair.magnitude <= cell.diameter() + 1e-12);
    // Injective on the loop and uniformly spread (uniform source arclengths).
    ClosedPolyline curve(cell.region);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j)
            CHECK(dist(repair.values[i], repair.values[j]) > 1e-9);
        CHECK(dist(repair.values[i], curve.at(curve.total_length * i / n)) <= 1e-9);
    }
}

TEST_CASE("repair removes a single backtracking vertex") {
    Cell cell = internal_square_cell({0.5, 0.5}, 0.5, 1.5);
    ClosedPolyline curve(cell.region);
    const int n = 8;
    std::vector<double> params;
    for (int i = 0; i < n; ++i) params.push_back(curve.total_length * i / n);
    const double backtrack = 0.3;
    params[5] = params[4] - backtrack;  // one vertex steps backwards
    std::vector<Vec2> trace;
    for (double t : params) trace.push_back(curve.at(t));
    std::vector<double> arclens(n, 1.0);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);

    // Slack below the backtrack size so the violation is repaired.
    TraceRepair repair = repair_boundary_trace(trace, arclens, cell, target, 0.02);
    CHECK_FALSE(repair.redistributed);
    CHECK(repair.magnitude <= backtrack + 0.1);
    // Cyclic order preserved and strictly increasing after repair.
    std::vector<double> out_params;
    for (const Vec2& q : repair.values) out_params.push_back(curve.project(q).first);
    for (int i = 1; i < n; ++i) {
        double step = std::fmod(out_params[i] - out_params[i - 1] + curve.total_length,
                                curve.total_length);
        CHECK(step > 0.0);
        CHECK(step < curve.total_length / 2);
    }
    // Untouched vertices stay put.
    for (int i : {0, 1, 2, 3}) CHECK(dist(repair.values[i], trace[i]) <= 1e-12);
}

TEST_CASE("repair rejects traces far outside the cell") {
    Cell cell = internal_square_cell({0.5, 0.5}, 0.1, 0.3);
    std::vector<Vec2> trace(6, Vec2{5.0, 5.0});
    std::vector<double> arclens(6, 1.0);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    CHECK_THROWS_AS(repair_boundary_trace(trace, arclens, cell, target), ConsistencyError);
}

TEST_CASE("replacement leaves the identity map essentially unchanged") {
    auto mesh = build_rect_mesh(1.0, 1.0, 8);
    DiscreteMap id = DiscreteMap::identity(mesh);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({0.5, 0.5}, 0.25, 1.0);
    PreCell pre = compute_precell(id, cell, target);
    REQUIRE(!pre.triangles.empty());

    auto [out, step] = replace_on_precell(id, pre, cell, target, 2.0, ChainConfig{});
    CHECK(step.boundary_repair_magnitude <= 1e-12);
    CHECK(step.sup_displacement <= 1e-9);
    CHECK(step.rkc_negative == 0);
    CHECK(step.energy_after <= step.energy_before + 1e-12);

    // Locality: vertices outside the pre-cell are bitwise untouched.
    std::set<int> inside;
    for (int t : pre.triangles)
        for (int k = 0; k < 3; ++k) inside.insert(mesh->triangles[t][k]);
    for (int v = 0; v < mesh->vertex_count(); ++v) {
        if (inside.count(v)) continue;
        CHECK(out.images[v].x == id.images[v].x);
        CHECK(out.images[v].y == id.images[v].y);
    }
}

TEST_CASE("an interior collapse is reopened with no boundary repair") {
    auto mesh = build_rect_mesh(1.0, 1.0, 10);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({0.5, 0.5}, 0.2, 0.6);

    // Collapse a blob strictly inside the cell: the pre-cell boundary trace
    // stays untouched and the solve alone reopens the interior.
    DiscreteMap squashed = DiscreteMap::identity(mesh);
    for (int v = 0; v < mesh->vertex_count(); ++v)
        if (dist(mesh->vertices[v], {0.5, 0.5}) < 0.17) squashed.images[v] = {0.5, 0.5};

    PreCell pre = compute_precell(squashed, cell, target);
    REQUIRE(!pre.triangles.empty());
    auto [out, step] = replace_on_precell(squashed, pre, cell, target, 2.0, ChainConfig{});
    CHECK(step.boundary_repair_magnitude <= 1e-12);
    CHECK(step.energy_after <= step.energy_before + step.repair_energy_delta + 1e-9);
    CHECK(step.rkc_negative == 0);
    CHECK(step.rkc_zero == 0);
}

TEST_CASE("a fully collapsed pre-cell is redistributed over the whole cell") {
    auto mesh = build_rect_mesh(1.0, 1.0, 10);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({0.5, 0.5}, 0.2, 0.6);

    // Collapse past the cell size: every pre-cell triangle, boundary walk
    // included, lands on the cell center.
    DiscreteMap squashed = DiscreteMap::identity(mesh);
    for (int v = 0; v < mesh->vertex_count(); ++v)
        if (dist(mesh->vertices[v], {0.5, 0.5}) < 0.34) squashed.images[v] = {0.5, 0.5};

    PreCell pre = compute_precell(squashed, cell, target);
    REQUIRE(!pre.triangles.empty());
    auto [out, step] = replace_on_precell(squashed, pre, cell, target, 2.0, ChainConfig{});
    CHECK(step.boundary_repair_magnitude > 0.0);
    CHECK(step.boundary_repair_magnitude <= cell.diameter() + 1e-12);
    CHECK(step.energy_after <= step.energy_before + step.repair_energy_delta + 1e-9);

    // The pre-cell now maps homeomorphically onto the cell.
    CHECK(step.rkc_negative == 0);
    CHECK(step.rkc_zero == 0);
}

TEST_CASE("rkc property: random homeomorphic traces give positive jacobians") {
    auto mesh = build_rect_mesh(1.0, 1.0, 12);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    Cell cell = internal_square_cell({0.5, 0.5}, 0.5, 1.5);
    PreCell pre = compute_precell(DiscreteMap::identity(mesh), cell, target);
    REQUIRE(static_cast<int>(pre.triangles.size()) == mesh->triangle_count());

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.25, 1.0);
    ClosedPolyline curve(cell.region);
    for (double p : {2.0, 3.0}) {
        for (int trial = 0; trial < 3; ++trial) {
            // Random monotone speeds with a positive floor.
            const std::size_t n = pre.boundary_walk.size();
            std::vector<double> speeds(n);
            double total = 0.0;
            for (double& s : speeds) total += (s = u(rng));
            DiscreteMap map = DiscreteMap::identity(mesh);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                map.images[pre.boundary_walk[i]] = curve.at(curve.total_length * acc / total);
                acc += speeds[i];
            }
            auto [out, step] = replace_on_precell(map, pre, cell, target, p, ChainConfig{});
            CHECK(step.rkc_negative == 0);
            CHECK(step.rkc_zero == 0);
        }
    }
}

TEST_CASE("chain on the identity stays near the identity and injective") {
    auto mesh = build_rect_mesh(1.0, 1.0, 16);
    DiscreteMap id = DiscreteMap::identity(mesh);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    const double epsilon = 0.5;
    CellCover cover = build_cell_cover(target, epsilon);

    auto [out, report] = homeomorphize_chain(id, target, cover, 2.0, ChainConfig{});
    CHECK(report.jacobian_negative == 0);
    CHECK(report.jacobian_zero == 0);
    CHECK(report.injective);
    CHECK(report.final_sup_distance_to_input <=
          3.0 * epsilon + report.total_repair_magnitude + 1e-9);
    CHECK(report.final_energy <=
          report.input_energy + std::max(0.0, report.total_repair_energy_delta) + 1e-6);
    // Per-step energy monotonicity modulo the recorded repair delta.
    for (const ChainStep& step : report.steps) {
        if (step.skipped) continue;
        CHECK(step.energy_after <= step.energy_before + step.repair_energy_delta + 1e-9);
    }
}

TEST_CASE("chain rejects non-monotone inputs") {
    auto mesh = build_rect_mesh(1.0, 1.0, 12);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    std::vector<Vec2> images;
    for (const Vec2& v : mesh->vertices)
        images.push_back({v.x <= 0.5 ? v.x : 1.0 - v.x, v.y});  // fold across x = 1/2
    DiscreteMap folded(mesh, images);
    CellCover cover = build_cell_cover(target, 0.4);
    CHECK_THROWS_AS(homeomorphize_chain(folded, target, cover, 2.0, ChainConfig{}),
                    InvalidArgument);
}

TEST_CASE("approximation sequence with one epsilon equals a single chain run") {
    auto mesh = build_rect_mesh(1.0, 1.0, 12);
    DiscreteMap id = DiscreteMap::identity(mesh);
    PolygonalDomain target = make_rect_domain(1.0, 1.0);

    std::vector<double> eps{0.5};
    auto seq = approximation_sequence(id, target, 2.0, eps, ChainConfig{});
    REQUIRE(seq.size() == 1);
    CellCover cover = build_cell_cover(target, 0.5);
    auto [direct, report] = homeomorphize_chain(id, target, cover, 2.0, ChainConfig{});
    for (int v = 0; v < mesh->vertex_count(); ++v)
        CHECK(dist(seq[0].first.images[v], direct.images[v]) == 0.0);
    CHECK(seq[0].second.royden_distance_to_input ==
          doctest::Approx(report.royden_distance_to_input));

    std::vector<double> bad{0.5, 0.7};
    CHECK_THROWS_AS(approximation_sequence(id, target, 2.0, bad, ChainConfig{}),
                    InvalidArgument);
    CHECK_THROWS_AS(approximation_sequence(id, target, 2.0, {}, ChainConfig{}), InvalidArgument);
}
