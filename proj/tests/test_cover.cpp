#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "monomap/cover.hpp"
#include "monomap/errors.hpp"

using namespace monomap;

TEST_CASE("unit square with a huge epsilon still yields a tiny valid cover") {
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    CellCover cover = build_cell_cover(target, 2.0);
    CHECK(cover.cells.size() <= 9);
    CHECK(cover.multiplicity <= 3);
    CoverVerification v = verify_cover(cover, target);
    CHECK(v.pass);
    CHECK(v.max_diameter < 2.0);
}

TEST_CASE("epsilon larger than the domain diameter degenerates gracefully") {
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    CellCover cover = build_cell_cover(target, 50.0);
    CHECK(cover.cells.size() <= 9);
    CHECK(verify_cover(cover, target).pass);
}

TEST_CASE("annulus cover classifies every boundary cell on a single circle") {
    PolygonalDomain target = make_annulus_domain(1.0, 1.25, 256);
    CellCover cover = build_cell_cover(target, 0.3);
    CoverVerification v = verify_cover(cover, target);
    CHECK(v.pass);
    int boundary_cells = 0;
    for (const Cell& cell : cover.cells) {
        if (cell.kind != Cell::Kind::boundary) continue;
        ++boundary_cells;
        REQUIRE(!cell.external_face.empty());
        CHECK((cell.face_loop == 0 || cell.face_loop == 1));
        // Every face point sits on the circle its loop discretizes.
        double radius = cell.face_loop == 0 ? 1.25 : 1.0;
        double chord_dip = radius * (1.0 - std::cos(M_PI / 256));
        for (const Vec2& q : cell.external_face) {
            CHECK(q.norm() <= radius + 1e-9);
            CHECK(q.norm() >= radius - chord_dip - 1e-9);
        }
        CHECK(std::abs(cell.extension_dir.norm() - 1.0) <= 1e-15);
        CHECK(cell.region.size() >= 3);
        CHECK(polygon_signed_area(cell.region) > 0.0);
    }
    CHECK(boundary_cells > 0);
}

TEST_CASE("damaged covers are reported, not repaired") {
    PolygonalDomain target = make_rect_domain(2.0, 1.0);
    CellCover cover = build_cell_cover(target, 0.5);
    REQUIRE(verify_cover(cover, target).pass);

    // Remove one internal cell: coverage misses must show up.
    CellCover damaged = cover;
    for (std::size_t i = 0; i < damaged.cells.size(); ++i) {
        if (damaged.cells[i].kind == Cell::Kind::internal) {
            damaged.cells.erase(damaged.cells.begin() + i);
            break;
        }
    }
    CoverVerification missing = verify_cover(damaged, target);
    CHECK_FALSE(missing.coverage_ok);
    CHECK(missing.coverage_misses > 0);
    CHECK(!missing.miss_points.empty());

    // Stack four coincident cells: the multiplicity bound must trip.
    CellCover stacked = cover;
    Cell dup = stacked.cells.front();
    for (int k = 0; k < 4; ++k) stacked.cells.push_back(dup);
    CoverVerification mult = verify_cover(stacked, target);
    CHECK_FALSE(mult.multiplicity_ok);
    CHECK(mult.max_multiplicity > 3);
}

TEST_CASE("random domains and epsilons verify clean") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> side(0.5, 3.0), eps(0.15, 2.0);
    std::uniform_real_distribution<double> inner(0.4, 1.2), gap(0.2, 1.5);
    for (int trial = 0; trial < 8; ++trial) {
        PolygonalDomain target =
            trial % 2 == 0
                ? make_rect_domain(side(rng), side(rng))
                : make_annulus_domain(inner(rng), inner(rng) + gap(rng), 96);
        CellCover cover = build_cell_cover(target, eps(rng));
        CoverVerification v = verify_cover(cover, target);
        CHECK(v.pass);
        CHECK(cover.multiplicity <= 3);
    }
}

TEST_CASE("cell cap produces a resource error naming the cap") {
    PolygonalDomain target = make_annulus_domain(1.0, 1.25, 128);
    CoverConfig config;
    config.max_cells = 400;
    try {
        build_cell_cover(target, 0.01, config);
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("400") != std::string::npos);
    }
}

TEST_CASE("cover rejects bad arguments") {
    PolygonalDomain target = make_rect_domain(1.0, 1.0);
    CHECK_THROWS_AS(build_cell_cover(target, 0.0), InvalidArgument);
    CoverConfig config;
    config.overlap_fraction = 0.5;  // breaks the multiplicity guarantee
    CHECK_THROWS_AS(build_cell_cover(target, 0.5, config), InvalidArgument);
}
