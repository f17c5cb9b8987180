#pragma once

#include <utility>
#include <vector>

#include "monomap/domain.hpp"
#include "monomap/mesh.hpp"

namespace monomap {

struct MonotonicityReport {
    std::vector<Vec2> sampled_points;
    std::vector<int> fiber_component_counts;  // one entry per sampled point
    double delta = 0.0;                       // fiber thickening radius used
    bool pass = false;                        // every count <= 1 (empty fibers are legal)
    std::vector<Vec2> failing_points;
};

// Discrete fiber connectivity test: for each sampled point b the set of
// triangles whose image meets the disc B(b, delta) must be edge-connected.
// delta <= 0 selects the default, twice the largest image-triangle diameter.
MonotonicityReport check_monotone_fibers(const DiscreteMap& map,
                                         const PolygonalDomain& target,
                                         int sample_grid,
                                         double delta = 0.0);

struct OrientationCensus {
    int positive = 0;
    int zero = 0;
    int negative = 0;
    double tolerance = 0.0;
    std::vector<int> zero_triangles;
    std::vector<int> negative_triangles;
};

OrientationCensus check_orientation(const DiscreteMap& map);

struct InjectivityReport {
    bool injective = false;
    OrientationCensus census;
    std::vector<std::pair<int, int>> overlap_witnesses;  // non-adjacent image triangle pairs
};

// Positive Jacobians everywhere plus no overlap between images of
// non-adjacent triangles. Witnesses are sorted and exact up to the 1e-12
// scale guard of the orientation predicates.
InjectivityReport check_injectivity(const DiscreteMap& map);

struct ModulusPairMargin {
    int a = 0, b = 0;
    double lhs = 0.0;    // |h(a) - h(b)|^2
    double rhs = 0.0;    // C * E_2 / log(e + 1/|a - b|)
    double ratio = 0.0;  // lhs / rhs
    bool skipped = false;
};

struct ModulusReport {
    std::vector<ModulusPairMargin> pairs;
    double max_ratio = 0.0;
    double fitted_c = 0.0;  // smallest constant making every ratio <= 1
    double dirichlet_energy = 0.0;
};

// Logarithmic modulus-of-continuity margins; the constant is fitted per
// domain, never asserted a priori.
ModulusReport modulus_of_continuity_bound(const DiscreteMap& map,
                                          std::span<const std::pair<int, int>> pairs,
                                          double constant_c);

}  // namespace monomap
