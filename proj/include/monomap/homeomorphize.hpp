#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "monomap/cover.hpp"
#include "monomap/mesh.hpp"
#include "monomap/psolver.hpp"

namespace monomap {

// Discrete pre-cell: the triangles whose vertex images lie in the closed cell
// (extended past the external face for boundary cells), reduced to the
// largest edge-connected component with enclosed complement islands absorbed.
struct PreCell {
    std::vector<int> triangles;          // sorted
    std::vector<int> boundary_walk;      // closed vertex loop, interior on the left
    std::vector<int> boundary_vertices;  // sorted unique walk members
    Cell::Kind kind = Cell::Kind::internal;
    bool degenerate = false;  // boundary did not reduce to a single loop
};

PreCell compute_precell(const DiscreteMap& map, const Cell& cell, const PolygonalDomain& target);

struct TraceRepair {
    std::vector<Vec2> values;
    double magnitude = 0.0;      // max displacement applied
    bool redistributed = false;  // winding collapsed, trace rebuilt by arclength
};

// Cyclically weakly monotone repair of a pre-cell boundary trace. Collapsed
// runs (consecutive equal values), order violations beyond the slack and
// out-of-region values are projected onto the boundary of (cell intersected
// with the target) by source-arclength proportion between their surrounding
// anchors; valid values keep their exact position. order_slack_fraction is
// the tolerated cyclic-order violation as a fraction of the region perimeter.
// protected_mask (one flag per trace vertex) pins domain-boundary vertices:
// they are never treated as collapsed-run members, so interface runs spread
// along the residual walls instead of the external face those vertices own.
TraceRepair repair_boundary_trace(std::span<const Vec2> trace,
                                  std::span<const double> source_arclengths,
                                  const Cell& cell,
                                  const PolygonalDomain& target,
                                  double order_slack_fraction = 0.1,
                                  std::span<const char> protected_mask = {});

struct ChainStep {
    int cell_index = -1;
    bool skipped = false;             // empty or degenerate pre-cell
    double energy_before = 0.0;       // whole-map anisotropic p-energy
    double energy_after = 0.0;
    double repair_energy_delta = 0.0; // energy change caused by the trace repair alone
    double sup_displacement = 0.0;
    int precell_size = 0;
    double boundary_repair_magnitude = 0.0;
    int rkc_negative = 0;             // nonpositive Jacobians inside the solved pre-cell
    int rkc_zero = 0;
};

struct ChainReport {
    std::vector<ChainStep> steps;
    double final_sup_distance_to_input = 0.0;
    double royden_distance_to_input = 0.0;
    double final_energy = 0.0;
    double input_energy = 0.0;
    double total_repair_magnitude = 0.0;     // sum of step magnitudes
    double total_repair_energy_delta = 0.0;  // signed sum
    int jacobian_positive = 0;
    int jacobian_zero = 0;
    int jacobian_negative = 0;
    bool injective = false;
    double epsilon = 0.0;
    double p = 2.0;
};

struct ChainConfig {
    PSolveConfig solver;
    CoverConfig cover;
    bool check_monotonicity = true;
    int monotone_sample_grid = 64;
    bool run_injectivity_check = true;
    double trace_order_slack = 0.1;
};

class ChainFailure : public std::runtime_error {
public:
    ChainFailure(const std::string& msg, ChainReport partial_)
        : std::runtime_error(msg), partial(std::move(partial_)) {}
    ChainReport partial;
};

// One p-harmonic replacement: repair the pre-cell boundary trace, solve the
// coordinate-wise Dirichlet problem inside, leave every other vertex as is.
std::pair<DiscreteMap, ChainStep> replace_on_precell(const DiscreteMap& map,
                                                     const PreCell& precell,
                                                     const Cell& cell,
                                                     const PolygonalDomain& target,
                                                     double p,
                                                     const ChainConfig& config);

// One pass over the cover in cell order. The input must be discrete-monotone;
// the fiber check runs first and rejects maps with disconnected fibers.
std::pair<DiscreteMap, ChainReport> homeomorphize_chain(const DiscreteMap& map,
                                                        const PolygonalDomain& target,
                                                        const CellCover& cover,
                                                        double p,
                                                        const ChainConfig& config);

// One chain run per epsilon (strictly decreasing); each report carries the
// Royden-norm distance of its output to the input map.
std::vector<std::pair<DiscreteMap, ChainReport>> approximation_sequence(
    const DiscreteMap& map,
    const PolygonalDomain& target,
    double p,
    std::span<const double> epsilons,
    const ChainConfig& config);

}  // namespace monomap
