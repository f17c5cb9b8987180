#pragma once

#include <utility>

#include "monomap/mesh.hpp"

namespace monomap {

// Source annulus r < |z| < R with r < 1 < R; the matching target annulus has
// inner radius 1 and outer radius (R + 1/R)/2.
struct AnnulusPair {
    double r = 0.5;
    double R = 2.0;

    AnnulusPair() = default;
    AnnulusPair(double r_, double R_);

    double target_inner() const { return 1.0; }
    double target_outer() const { return 0.5 * (R + 1.0 / R); }
};

// Piecewise harmonic map collapsing the collar r < |z| <= 1 onto the unit
// circle and mapping 1 < |z| < R by z -> (z + 1/conj(z))/2.
Vec2 nitsche_map(const AnnulusPair& pair, const Vec2& z);

// Coefficients of the harmonic solution A z + B/conj(z) to the Dirichlet data
// z/r on the inner circle and (1 + 1/R^2) z / 2 on the outer circle.
std::pair<double, double> folded_coeffs(const AnnulusPair& pair);

Vec2 folded_harmonic(const AnnulusPair& pair, const Vec2& z);

// Radius sqrt(B/A) where the analytic Jacobian A^2 - B^2/|z|^4 vanishes.
double folding_radius(const AnnulusPair& pair);

// Analytic Jacobian of the folded harmonic map at radius |z|.
double folded_jacobian(const AnnulusPair& pair, double radius);

enum class ClosedFormEnergy {
    nitsche_inner_part,  // collar r < |z| < 1, integrand |z|^-2
    nitsche_outer_part,  // 1 < |z| < R, integrand (1 + |z|^-4)/2
    nitsche_total,
    folded,              // integrand 2 (A^2 + B^2 |z|^-4)
};

// Closed-form Dirichlet energies of the reference maps, each cross-checked
// against adaptive radial quadrature to 1e-10 relative before returning.
double closed_form_dirichlet_energy(const AnnulusPair& pair, ClosedFormEnergy which);

enum class OracleMap { identity, nitsche, folded };

// Vertexwise evaluation; every mesh vertex must lie in the closed annulus.
DiscreteMap sample_map_on_mesh(OracleMap formula, const MeshPtr& mesh, const AnnulusPair& pair);

}  // namespace monomap
