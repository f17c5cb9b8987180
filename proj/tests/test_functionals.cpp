#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "monomap/errors.hpp"
#include "monomap/functionals.hpp"
#include "monomap/oracle.hpp"

using namespace monomap;

namespace {

DiscreteMap linear_map(MeshPtr mesh, double a11, double a12, double a21, double a22) {
    std::vector<Vec2> images;
    images.reserve(mesh->vertices.size());
    for (const Vec2& v : mesh->vertices)
        images.push_back({a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y});
    return DiscreteMap(std::move(mesh), std::move(images));
}

DiscreteMap random_map(MeshPtr mesh, std::mt19937_64& rng, double amplitude = 0.3) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::vector<Vec2> images;
    images.reserve(mesh->vertices.size());
    for (const Vec2& v : mesh->vertices) images.push_back({v.x + u(rng), v.y + u(rng)});
    return DiscreteMap(std::move(mesh), std::move(images));
}

}  // namespace

TEST_CASE("differentials of simple linear maps") {
    auto mesh = build_rect_mesh(1.0, 1.0, 3);

    for (const auto& d : triangle_differentials(DiscreteMap::identity(mesh))) {
        CHECK(d.grad_u.x == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.grad_u.y == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(d.grad_v.x == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(d.grad_v.y == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.jacobian == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (const auto& d : triangle_differentials(linear_map(mesh, 2, 0, 0, 3)))
        CHECK(d.jacobian == doctest::Approx(6.0).epsilon(1e-14));
    for (const auto& d : triangle_differentials(linear_map(mesh, 0, 1, 1, 0)))
        CHECK(d.jacobian == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("anisotropic energy basics") {
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    CHECK(energy_aniso(DiscreteMap::identity(mesh), 2.0).total ==
          doctest::Approx(2.0).epsilon(1e-13));

    DiscreteMap constant(mesh, std::vector<Vec2>(mesh->vertex_count(), Vec2{0.3, -0.2}));
    for (double p : {1.5, 2.0, 3.0})
        CHECK(energy_aniso(constant, p).total == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(energy_aniso(DiscreteMap::identity(mesh), 1.0), InvalidArgument);
}

TEST_CASE("identity energy equals twice the area, disc limit 2 pi") {
    // Exact identity: aniso density is 2 on every triangle, so the energy is
    // exactly twice the mesh area; the disc-approximation error goes to zero.
    auto mesh = build_annulus_mesh(1e-3, 1.0, 24, 256);
    DiscreteMap id = DiscreteMap::identity(mesh);
    double e = energy_aniso(id, 2.0).total;
    CHECK(e == doctest::Approx(2.0 * mesh->total_area()).epsilon(1e-12));
    CHECK(e == doctest::Approx(2.0 * M_PI).epsilon(5e-4));
}

TEST_CASE("iso equals aniso at p = 2 on random maps") {
    std::mt19937_64 rng(7);
    auto mesh = build_rect_mesh(1.0, 1.0, 5);
    for (int trial = 0; trial < 20; ++trial) {
        DiscreteMap map = random_map(mesh, rng);
        CHECK(energy_iso(map, 2.0).total ==
              doctest::Approx(energy_aniso(map, 2.0).total).epsilon(1e-14));
    }
}

TEST_CASE("iso energy of the identity at p = 4") {
    auto mesh = build_rect_mesh(1.0, 1.0, 2);
    CHECK(energy_iso(DiscreteMap::identity(mesh), 4.0).total ==
          doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("sampled folded map converges to the closed-form energy") {
    AnnulusPair pair(0.5, 2.0);
    const double exact = closed_form_dirichlet_energy(pair, ClosedFormEnergy::folded);
    double prev_err = -1.0;
    for (int level = 0; level < 3; ++level) {
        auto mesh = build_annulus_mesh(0.5, 2.0, 8 << level, 48 << level);
        double e = energy_iso(sample_map_on_mesh(OracleMap::folded, mesh, pair), 2.0).total;
        double err = std::abs(e - exact);
        if (prev_err > 0.0) CHECK(err < 0.35 * prev_err);  // roughly second order
        prev_err = err;
        if (level == 2) CHECK(err <= 0.01 * exact);
    }
}

TEST_CASE("neohookean energy and its orientation gate") {
    auto mesh = build_rect_mesh(1.0, 1.0, 3);
    CHECK(energy_neohookean(DiscreteMap::identity(mesh)).total ==
          doctest::Approx(3.0).epsilon(1e-13));
    CHECK(energy_neohookean(linear_map(mesh, 2, 0, 0, 0.5)).total ==
          doctest::Approx(5.25).epsilon(1e-13));

    DiscreteMap flipped = linear_map(mesh, 0, 1, 1, 0);
    CHECK_THROWS_AS(energy_neohookean(flipped), OrientationError);
    try {
        energy_neohookean(flipped);
    } catch (const OrientationError& e) {
        CHECK(e.triangles.size() == static_cast<std::size_t>(mesh->triangle_count()));
    }
}

TEST_CASE("energy scaling law") {
    std::mt19937_64 rng(11);
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    DiscreteMap map = random_map(mesh, rng);
    for (double p : {1.5, 2.0, 3.7}) {
        for (double c : {0.5, -2.0, 3.25}) {
            DiscreteMap scaled = map;
            for (Vec2& q : scaled.images) q = q * c;
            CHECK(energy_aniso(scaled, p).total ==
                  doctest::Approx(std::pow(std::abs(c), p) * energy_aniso(map, p).total)
                      .epsilon(1e-11));
        }
    }
}

TEST_CASE("coercivity sandwich between iso and aniso energies") {
    std::mt19937_64 rng(13);
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    for (int trial = 0; trial < 10; ++trial) {
        DiscreteMap map = random_map(mesh, rng);
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            double aniso = energy_aniso(map, p).total;
            double iso = energy_iso(map, p).total;
            double factor = std::pow(2.0, std::abs(1.0 - p / 2.0));
            double slack = 1e-12 * (1.0 + aniso + iso);
            if (p >= 2.0) {
                CHECK(aniso <= iso + slack);
                CHECK(iso <= factor * aniso + slack);
            } else {
                CHECK(iso <= aniso + slack);
                CHECK(aniso <= factor * iso + slack);
            }
        }
    }
}

TEST_CASE("energies are continuous along strongly converging sequences") {
    std::mt19937_64 rng(17);
    auto mesh = build_rect_mesh(1.0, 1.0, 5);
    DiscreteMap f = DiscreteMap::identity(mesh);
    DiscreteMap bump = random_map(mesh, rng, 0.2);
    const double e_limit = energy_aniso(f, 3.0).total;
    double prev_gap = -1.0;
    for (int k = 1; k <= 6; ++k) {
        DiscreteMap g = f;
        double scale = std::pow(0.5, k);
        for (std::size_t i = 0; i < g.images.size(); ++i)
            g.images[i] = f.images[i] + (bump.images[i] - f.images[i]) * scale;
        double gap = std::abs(energy_aniso(g, 3.0).total - e_limit);
        if (prev_gap >= 0.0) CHECK(gap < prev_gap);
        prev_gap = gap;
        if (k == 6) CHECK(gap < 1e-2 * (1.0 + e_limit));
    }
}

TEST_CASE("energy report totals match their per-triangle entries") {
    std::mt19937_64 rng(23);
    auto mesh = build_rect_mesh(2.0, 1.0, 6);
    DiscreteMap map = random_map(mesh, rng);
    for (const EnergyReport& r :
         {energy_aniso(map, 2.5), energy_iso(map, 3.0), energy_neohookean(DiscreteMap::identity(mesh))}) {
        double sum = 0.0;
        for (double x : r.per_triangle) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(r.total == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("royden distance examples") {
    auto mesh = build_rect_mesh(1.0, 1.0, 4);
    DiscreteMap f = DiscreteMap::identity(mesh);

    CHECK(w1p_distance(f, f, 2.0) == doctest::Approx(0.0).epsilon(1e-15));

    DiscreteMap shifted = f;
    for (Vec2& q : shifted.images) q += Vec2{0.3, -0.4};
    CHECK(w1p_distance(f, shifted, 2.0) == doctest::Approx(0.5).epsilon(1e-12));

    DiscreteMap stretched = linear_map(mesh, 2, 0, 0, 1);
    CHECK(w1p_distance(f, stretched, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

    auto other = build_rect_mesh(1.0, 1.0, 4);
    CHECK_THROWS_AS(w1p_distance(f, DiscreteMap::identity(other), 2.0), InvalidArgument);
}
