#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "monomap/mesh.hpp"

namespace monomap {

struct PSolveConfig {
    double p = 2.0;
    double tolerance = 1e-10;  // gradient norm threshold, relative to the initial gradient
    int max_iterations = 200;
    double regularization_delta = 1e-10;  // smoothing of |grad|^p for derivatives only
    bool fast_path_p2 = true;             // direct sparse solve when p == 2
};

// Scalar Dirichlet problem: minimize sum_T area * |grad phi|^p over the free
// vertices of the active triangle set, the rest held at fixed_values.
struct PSolveProblem {
    MeshPtr mesh;
    std::vector<int> active_triangles;               // empty means all triangles
    std::vector<int> free_vertices;
    std::vector<std::pair<int, double>> fixed_values;  // every active non-free vertex
    PSolveConfig config;
};

struct PSolveReport {
    int iterations = 0;
    std::vector<double> energy_trace;  // regularized energy at each accepted iterate; nonincreasing
    double final_gradient_norm = 0.0;
    double gradient_threshold = 0.0;   // absolute threshold the solve ran against
    bool converged = false;
    double final_energy = 0.0;         // unregularized (delta = 0) energy of the solution
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& msg, PSolveReport report_, std::vector<double> best_values_)
        : std::runtime_error(msg), report(std::move(report_)), best_values(std::move(best_values_)) {}
    PSolveReport report;
    std::vector<double> best_values;  // free-vertex values at the last iterate
};

// Returns the minimizing free-vertex values (ordered like problem.free_vertices).
// Throws SolveFailure when max_iterations runs out before the tolerance is met.
std::pair<std::vector<double>, PSolveReport>
solve_scalar_p_dirichlet(const PSolveProblem& problem, std::span<const double> initial_guess);

// Regularized energy and its gradient at the given free values; the exact
// quantities the Newton iteration uses, exposed for finite-difference checks.
std::pair<double, std::vector<double>>
scalar_energy_and_gradient(const PSolveProblem& problem, std::span<const double> free_values);

bool maximum_principle_check(std::span<const double> solution, const PSolveProblem& problem);

// Coordinate-wise p-harmonic map solve on a triangle subset. The two scalar
// solves are independent; boundary_values must cover every boundary vertex of
// the region (interface edges and mesh-boundary vertices alike).
struct MapSolveResult {
    std::vector<int> vertices;   // all vertices of the region, sorted
    std::vector<Vec2> values;    // solved/prescribed value per vertex above
    PSolveReport report_u, report_v;
};

MapSolveResult solve_map_p_dirichlet(const MeshPtr& mesh,
                                     std::span<const int> region,
                                     const std::vector<std::pair<int, Vec2>>& boundary_values,
                                     double p,
                                     const PSolveConfig& config,
                                     const DiscreteMap* warm_start = nullptr);

}  // namespace monomap
