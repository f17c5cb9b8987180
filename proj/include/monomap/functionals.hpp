#pragma once

#include <vector>

#include "monomap/mesh.hpp"

namespace monomap {

// Constant per-triangle differential of the piecewise-linear map.
struct TriangleDifferential {
    Vec2 grad_u;      // gradient of the first image coordinate
    Vec2 grad_v;      // gradient of the second image coordinate
    double jacobian;  // grad_u.x * grad_v.y - grad_u.y * grad_v.x
    double area;      // source triangle area
};

std::vector<TriangleDifferential> triangle_differentials(const DiscreteMap& map);

struct EnergyReport {
    double p = 2.0;
    double total = 0.0;
    std::vector<double> per_triangle;  // density times area, one entry per triangle
};

// sum_T area * (|grad u|^p + |grad v|^p); exact for piecewise-linear maps.
EnergyReport energy_aniso(const DiscreteMap& map, double p);

// sum_T area * (|grad u|^2 + |grad v|^2)^(p/2). Coincides with aniso at p = 2.
EnergyReport energy_iso(const DiscreteMap& map, double p);

// sum_T area * (|Dh|^2 + 1/det Dh); requires positive Jacobians everywhere.
EnergyReport energy_neohookean(const DiscreteMap& map);

// Sup norm plus W^{1,p} seminorm of f - g: the convergence metric used for
// approximation sequences. Both maps must share a mesh.
double w1p_distance(const DiscreteMap& f, const DiscreteMap& g, double p);

}  // namespace monomap
