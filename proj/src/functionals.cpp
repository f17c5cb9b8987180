#include "monomap/functionals.hpp"

#include <cmath>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

namespace {

double kahan_total(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        double y = x - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

}  // namespace

std::vector<TriangleDifferential> triangle_differentials(const DiscreteMap& map) {
    const TriangleMesh& mesh = *map.mesh;
    const double area_floor = 1e-14 * mesh.scale() * mesh.scale();
    std::vector<TriangleDifferential> out(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        double area = mesh.triangle_signed_area(t);
        if (!(area > area_floor))
            throw DegeneracyError("triangle " + std::to_string(t) + " is numerically degenerate", t);
        // grad of the hat function at vertex k is perp(opposite edge)/(2 area)
        Vec2 gu{0, 0}, gv{0, 0};
        for (int k = 0; k < 3; ++k) {
            Vec2 opposite = mesh.vertices[tri[(k + 2) % 3]] - mesh.vertices[tri[(k + 1) % 3]];
            Vec2 grad_hat = opposite.perp() / (2.0 * area);
            const Vec2& img = map.images[tri[k]];
            gu += grad_hat * img.x;
            gv += grad_hat * img.y;
        }
        out[t] = {gu, gv, gu.x * gv.y - gu.y * gv.x, area};
    }
    return out;
}

EnergyReport energy_aniso(const DiscreteMap& map, double p) {
    if (!(p > 1.0)) throw InvalidArgument("energy exponent must satisfy p > 1");
    EnergyReport report;
    report.p = p;
    auto diffs = triangle_differentials(map);
    report.per_triangle.reserve(diffs.size());
    for (const auto& d : diffs)
        report.per_triangle.push_back(
            d.area * (std::pow(d.grad_u.norm2(), p / 2.0) + std::pow(d.grad_v.norm2(), p / 2.0)));
    report.total = kahan_total(report.per_triangle);
    return report;
}

EnergyReport energy_iso(const DiscreteMap& map, double p) {
    if (!(p > 1.0)) throw InvalidArgument("energy exponent must satisfy p > 1");
    EnergyReport report;
    report.p = p;
    auto diffs = triangle_differentials(map);
    report.per_triangle.reserve(diffs.size());
    for (const auto& d : diffs)
        report.per_triangle.push_back(d.area * std::pow(d.grad_u.norm2() + d.grad_v.norm2(), p / 2.0));
    report.total = kahan_total(report.per_triangle);
    return report;
}

EnergyReport energy_neohookean(const DiscreteMap& map) {
    auto diffs = triangle_differentials(map);
    std::vector<int> flipped;
    for (std::size_t t = 0; t < diffs.size(); ++t)
        if (!(diffs[t].jacobian > 0.0)) flipped.push_back(static_cast<int>(t));
    if (!flipped.empty()) {
        std::string msg = "neohookean energy needs positive Jacobians; " +
                          std::to_string(flipped.size()) + " triangle(s) fail, first is " +
                          std::to_string(flipped.front());
        throw OrientationError(msg, std::move(flipped));
    }
    EnergyReport report;
    report.p = 2.0;
    report.per_triangle.reserve(diffs.size());
    for (const auto& d : diffs)
        report.per_triangle.push_back(
            d.area * (d.grad_u.norm2() + d.grad_v.norm2() + 1.0 / d.jacobian));
    report.total = kahan_total(report.per_triangle);
    return report;
}

double w1p_distance(const DiscreteMap& f, const DiscreteMap& g, double p) {
    if (!(p > 1.0)) throw InvalidArgument("distance exponent must satisfy p > 1");
    if (f.mesh != g.mesh)
        throw InvalidArgument("w1p_distance needs maps on the same mesh");
    DiscreteMap diff = f;
    double sup = 0.0;
    for (std::size_t i = 0; i < diff.images.size(); ++i) {
        diff.images[i] = f.images[i] - g.images[i];
        sup = std::max(sup, diff.images[i].norm());
    }
    auto diffs = triangle_differentials(diff);
    std::vector<double> terms;
    terms.reserve(diffs.size());
    for (const auto& d : diffs)
        terms.push_back(d.area * std::pow(d.grad_u.norm2() + d.grad_v.norm2(), p / 2.0));
    return std::pow(kahan_total(terms), 1.0 / p) + sup;
}

}  // namespace monomap
