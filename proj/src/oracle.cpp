#include "monomap/oracle.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

// Energy of a radially symmetric density: integral of density(rho) * 2 pi rho.
double radial_energy(const std::function<double(double)>& density, double a, double b) {
    auto f = [&](double rho) { return density(rho) * 2.0 * M_PI * rho; };
    return integrate(f, a, b, 1e-13);
}

void cross_check(double closed_form, double quadrature, const char* label) {
    double rel = std::abs(closed_form - quadrature) / std::max(1.0, std::abs(closed_form));
    if (rel > 1e-10)
        throw ConsistencyError(std::string("closed-form energy '") + label +
                               "' disagrees with quadrature by relative " + std::to_string(rel));
}

double checked_radius(const AnnulusPair& pair, const Vec2& z, const char* what) {
    double rho = z.norm();
    double tol = 1e-9 * pair.R;
    if (rho < pair.r - tol || rho > pair.R + tol)
        throw InvalidArgument(std::string(what) + ": point (" + std::to_string(z.x) + ", " +
                              std::to_string(z.y) + ") with |z| = " + std::to_string(rho) +
                              " is outside the annulus [" + std::to_string(pair.r) + ", " +
                              std::to_string(pair.R) + "]");
    return rho;
}

}  // namespace

AnnulusPair::AnnulusPair(double r_, double R_) : r(r_), R(R_) {
    if (!(r > 0.0) || !(r < 1.0) || !(R > 1.0))
        throw InvalidArgument("annulus pair needs 0 < r < 1 < R");
}

Vec2 nitsche_map(const AnnulusPair& pair, const Vec2& z) {
    double rho = checked_radius(pair, z, "nitsche_map");
    if (rho <= 1.0) return z / rho;
    // (z + 1/conj(z))/2 = z (1 + 1/|z|^2) / 2
    return z * (0.5 * (1.0 + 1.0 / (rho * rho)));
}

std::pair<double, double> folded_coeffs(const AnnulusPair& pair) {
    const double r = pair.r, R = pair.R;
    double denom = 2.0 * (R * R - r * r);
    double A = (R * R - 2.0 * r + 1.0) / denom;
    double B = r * (2.0 * R * R - r * R * R - r) / denom;
    return {A, B};
}

Vec2 folded_harmonic(const AnnulusPair& pair, const Vec2& z) {
    double rho = checked_radius(pair, z, "folded_harmonic");
    auto [A, B] = folded_coeffs(pair);
    return z * (A + B / (rho * rho));  // A z + B/conj(z)
}

double folding_radius(const AnnulusPair& pair) {
    auto [A, B] = folded_coeffs(pair);
    return std::sqrt(B / A);
}

double folded_jacobian(const AnnulusPair& pair, double radius) {
    auto [A, B] = folded_coeffs(pair);
    double rho2 = radius * radius;
    return A * A - B * B / (rho2 * rho2);
}

double closed_form_dirichlet_energy(const AnnulusPair& pair, ClosedFormEnergy which) {
    const double r = pair.r, R = pair.R;
    switch (which) {
        case ClosedFormEnergy::nitsche_inner_part: {
            double closed = 2.0 * M_PI * std::log(1.0 / r);
            cross_check(closed, radial_energy([](double rho) { return 1.0 / (rho * rho); }, r, 1.0),
                        "nitsche inner");
            return closed;
        }
        case ClosedFormEnergy::nitsche_outer_part: {
            double closed = 0.5 * M_PI * (R * R - 1.0 / (R * R));
            cross_check(closed,
                        radial_energy(
                            [](double rho) {
                                double rho4 = rho * rho * rho * rho;
                                return 0.5 * (1.0 + 1.0 / rho4);
                            },
                            1.0, R),
                        "nitsche outer");
            return closed;
        }
        case ClosedFormEnergy::nitsche_total:
            return closed_form_dirichlet_energy(pair, ClosedFormEnergy::nitsche_inner_part) +
                   closed_form_dirichlet_energy(pair, ClosedFormEnergy::nitsche_outer_part);
        case ClosedFormEnergy::folded: {
            auto [A, B] = folded_coeffs(pair);
            double closed = 2.0 * M_PI *
                            (A * A * (R * R - r * r) + B * B * (1.0 / (r * r) - 1.0 / (R * R)));
            cross_check(closed,
                        radial_energy(
                            [A = A, B = B](double rho) {
                                double rho4 = rho * rho * rho * rho;
                                return 2.0 * (A * A + B * B / rho4);
                            },
                            r, R),
                        "folded harmonic");
            return closed;
        }
    }
    throw InvalidArgument("unknown closed-form energy");
}

DiscreteMap sample_map_on_mesh(OracleMap formula, const MeshPtr& mesh, const AnnulusPair& pair) {
    std::vector<Vec2> images;
    images.reserve(mesh->vertices.size());
    for (std::size_t i = 0; i < mesh->vertices.size(); ++i) {
        const Vec2& z = mesh->vertices[i];
        try {
            switch (formula) {
                case OracleMap::identity: images.push_back(z); break;
                case OracleMap::nitsche: images.push_back(nitsche_map(pair, z)); break;
                case OracleMap::folded: images.push_back(folded_harmonic(pair, z)); break;
            }
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("vertex " + std::to_string(i) + ": " + e.what());
        }
    }
    return DiscreteMap(mesh, std::move(images));
}

}  // namespace monomap
