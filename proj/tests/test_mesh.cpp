#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "monomap/errors.hpp"
#include "monomap/mesh.hpp"

using namespace monomap;

namespace {

// Shoelace area of the mesh's boundary loops (holes come out negative).
double loops_shoelace(const TriangleMesh& mesh) {
    double total = 0.0;
    for (const auto& loop : mesh.boundary_loops) {
        double a = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i)
            a += mesh.vertices[loop[i]].cross(mesh.vertices[loop[(i + 1) % loop.size()]]);
        total += 0.5 * a;
    }
    return total;
}

}  // namespace

TEST_CASE("rect mesh minimal split") {
    auto mesh = build_rect_mesh(1.0, 1.0, 1);
    CHECK(mesh->vertex_count() == 4);
    CHECK(mesh->triangle_count() == 2);
    CHECK(mesh->boundary_loops.size() == 1);
}

TEST_CASE("rect mesh 2x2 grid") {
    auto mesh = build_rect_mesh(1.0, 1.0, 2);
    CHECK(mesh->vertex_count() == 9);
    CHECK(mesh->triangle_count() == 8);
}

TEST_CASE("rect mesh conserves area") {
    auto mesh = build_rect_mesh(2.0, 1.0, 4);
    CHECK(mesh->total_area() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rect mesh rejects bad input") {
    CHECK_THROWS_AS(build_rect_mesh(0.0, 1.0, 2), InvalidArgument);
    CHECK_THROWS_AS(build_rect_mesh(1.0, -1.0, 2), InvalidArgument);
    CHECK_THROWS_AS(build_rect_mesh(1.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("annulus mesh single ring") {
    auto mesh = build_annulus_mesh(0.5, 2.0, 1, 4);
    CHECK(mesh->vertex_count() == 8);
    CHECK(mesh->triangle_count() == 8);
    CHECK(mesh->boundary_loops.size() == 2);
    for (int v = 0; v < 4; ++v)
        CHECK(mesh->vertices[v].norm() == doctest::Approx(0.5).epsilon(1e-14));
    for (int v = 4; v < 8; ++v)
        CHECK(mesh->vertices[v].norm() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("annulus mesh area converges to the exact annulus area") {
    // Exact area pi (4 - 0.25); the polygonal deficit shrinks like 1/m^2.
    const double exact = M_PI * 3.75;
    double prev_err = -1.0;
    for (int level = 0; level < 3; ++level) {
        int m = 64 << level;
        auto mesh = build_annulus_mesh(0.5, 2.0, 4 << level, m);
        double err = std::abs(mesh->total_area() - exact);
        if (prev_err > 0.0) CHECK(err < 0.35 * prev_err);
        prev_err = err;
        if (level == 2) CHECK(err <= exact * 2e-4);
    }
}

TEST_CASE("annulus mesh rejects degenerate radii") {
    CHECK_THROWS_AS(build_annulus_mesh(1.0, 1.0, 1, 4), InvalidArgument);
    CHECK_THROWS_AS(build_annulus_mesh(2.0, 0.5, 1, 4), InvalidArgument);
    CHECK_THROWS_AS(build_annulus_mesh(0.5, 2.0, 1, 2), InvalidArgument);
}

TEST_CASE("triangle areas are positive and match the boundary shoelace") {
    for (auto mesh : {build_rect_mesh(2.0, 1.0, 5), build_annulus_mesh(0.5, 2.0, 4, 24)}) {
        for (int t = 0; t < mesh->triangle_count(); ++t)
            CHECK(mesh->triangle_signed_area(t) > 0.0);
        CHECK(mesh->total_area() ==
              doctest::Approx(loops_shoelace(*mesh)).epsilon(1e-10));
    }
}

TEST_CASE("euler characteristic matches the number of holes") {
    auto rect = build_rect_mesh(1.0, 1.0, 3);
    CHECK(rect->vertex_count() - rect->edge_count() + rect->triangle_count() == 1);
    CHECK(rect->boundary_loops.size() == 1);

    auto ring = build_annulus_mesh(0.5, 2.0, 3, 12);
    CHECK(ring->vertex_count() - ring->edge_count() + ring->triangle_count() == 0);
    CHECK(ring->boundary_loops.size() == 2);
}

TEST_CASE("mesh construction validates orientation and manifoldness") {
    std::vector<Vec2> pts{{0, 0}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(TriangleMesh::build(pts, {{0, 2, 1}}), InvalidArgument);  // clockwise
    CHECK_THROWS_AS(TriangleMesh::build(pts, {{0, 1, 2}, {0, 1, 2}}), InvalidArgument);
    std::vector<Vec2> line{{0, 0}, {1, 0}, {2, 0}};
    CHECK_THROWS_AS(TriangleMesh::build(line, {{0, 1, 2}}), InvalidArgument);  // zero area
}

TEST_CASE("connected component of a seed") {
    auto mesh = build_rect_mesh(1.0, 1.0, 2);

    std::vector<int> single{3};
    CHECK(connected_component(*mesh, single, single) == std::vector<int>{3});

    std::vector<int> all;
    for (int t = 0; t < mesh->triangle_count(); ++t) all.push_back(t);
    CHECK(connected_component(*mesh, all, all) == all);
}

TEST_CASE("connected component separates two hand-built patches") {
    // Quads of the 2x2 grid: lower-left is {0,1}, upper-right is {6,7}; the
    // two patches share only the center vertex, no edge.
    auto mesh = build_rect_mesh(1.0, 1.0, 2);
    std::vector<int> patches{0, 1, 6, 7};
    auto comps = connected_components(*mesh, patches);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<int>{0, 1});
    CHECK(comps[1] == std::vector<int>{6, 7});

    std::vector<int> seed{0};
    CHECK(connected_component(*mesh, patches, seed) == std::vector<int>{0, 1});
}

TEST_CASE("boundary loops are oriented with the interior on the left") {
    auto mesh = build_annulus_mesh(0.5, 2.0, 2, 16);
    REQUIRE(mesh->boundary_loops.size() == 2);
    for (const auto& loop : mesh->boundary_loops) {
        double a = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i)
            a += mesh->vertices[loop[i]].cross(mesh->vertices[loop[(i + 1) % loop.size()]]);
        double radius = mesh->vertices[loop[0]].norm();
        if (radius > 1.0)
            CHECK(a > 0.0);  // outer loop counterclockwise
        else
            CHECK(a < 0.0);  // hole clockwise
    }
}
