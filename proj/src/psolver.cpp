#include "monomap/psolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "monomap/errors.hpp"

namespace monomap {

namespace {

struct TriData {
    int v[3];
    Vec2 ghat[3];  // hat-function gradients
    double area;
};

// Flattened view of one scalar Dirichlet problem.
struct Workspace {
    const PSolveProblem& problem;
    std::vector<int> tris;
    std::vector<TriData> tdata;
    std::vector<int> local_of_vertex;   // free vertex -> dof index, else -1
    std::vector<double> value;          // current value per global vertex (active ones)
    double p, delta;

    explicit Workspace(const PSolveProblem& prob) : problem(prob) {
        const TriangleMesh& mesh = *prob.mesh;
        p = prob.config.p;
        delta = prob.config.regularization_delta;
        if (!(p > 1.0)) throw InvalidArgument("p-harmonic solve needs p > 1");
        if (!(prob.config.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
        if (delta < 0.0) throw InvalidArgument("regularization delta must be nonnegative");

        tris = prob.active_triangles;
        if (tris.empty()) {
            tris.resize(mesh.triangle_count());
            for (int t = 0; t < mesh.triangle_count(); ++t) tris[t] = t;
        }

        local_of_vertex.assign(mesh.vertex_count(), -1);
        for (std::size_t i = 0; i < prob.free_vertices.size(); ++i) {
            int v = prob.free_vertices[i];
            if (v < 0 || v >= mesh.vertex_count() || local_of_vertex[v] != -1)
                throw InvalidArgument("bad free vertex " + std::to_string(v));
            local_of_vertex[v] = static_cast<int>(i);
        }

        value.assign(mesh.vertex_count(), 0.0);
        std::vector<char> has_value(mesh.vertex_count(), 0);
        for (auto [v, val] : prob.fixed_values) {
            if (v < 0 || v >= mesh.vertex_count())
                throw InvalidArgument("bad fixed vertex " + std::to_string(v));
            if (local_of_vertex[v] != -1)
                throw InvalidArgument("vertex " + std::to_string(v) + " is both free and fixed");
            if (!std::isfinite(val)) throw InvalidArgument("non-finite fixed value");
            value[v] = val;
            has_value[v] = 1;
        }
        for (int f : prob.free_vertices) has_value[f] = 1;

        tdata.reserve(tris.size());
        const double area_floor = 1e-14 * mesh.scale() * mesh.scale();
        for (int t : tris) {
            if (t < 0 || t >= mesh.triangle_count())
                throw InvalidArgument("bad active triangle " + std::to_string(t));
            const auto& tri = mesh.triangles[t];
            TriData d;
            d.area = mesh.triangle_signed_area(t);
            if (!(d.area > area_floor))
                throw DegeneracyError("triangle " + std::to_string(t) + " is numerically degenerate", t);
            for (int k = 0; k < 3; ++k) {
                d.v[k] = tri[k];
                if (!has_value[tri[k]])
                    throw InvalidArgument("active vertex " + std::to_string(tri[k]) +
                                          " is neither free nor fixed");
                Vec2 opposite = mesh.vertices[tri[(k + 2) % 3]] - mesh.vertices[tri[(k + 1) % 3]];
                d.ghat[k] = opposite.perp() / (2.0 * d.area);
            }
            tdata.push_back(d);
        }
    }

    int dof_count() const { return static_cast<int>(problem.free_vertices.size()); }

    void load(std::span<const double> x) {
        for (int i = 0; i < dof_count(); ++i) value[problem.free_vertices[i]] = x[i];
    }

    Vec2 triangle_gradient(const TriData& d) const {
        Vec2 g{0, 0};
        for (int k = 0; k < 3; ++k) g += d.ghat[k] * value[d.v[k]];
        return g;
    }

    double energy(double delta_override) const {
        const double d2 = delta_override * delta_override;
        double sum = 0.0, comp = 0.0;
        for (const auto& d : tdata) {
            double term = d.area * std::pow(triangle_gradient(d).norm2() + d2, p / 2.0);
            double y = term - comp;
            double s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        return sum;
    }

    Eigen::VectorXd gradient() const {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(dof_count());
        const double d2 = delta * delta;
        for (const auto& d : tdata) {
            Vec2 g = triangle_gradient(d);
            double coeff = d.area * p * std::pow(g.norm2() + d2, p / 2.0 - 1.0);
            for (int k = 0; k < 3; ++k) {
                int dof = local_of_vertex[d.v[k]];
                if (dof >= 0) grad[dof] += coeff * g.dot(d.ghat[k]);
            }
        }
        return grad;
    }

    Eigen::SparseMatrix<double> hessian() const {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(tdata.size() * 9);
        const double d2 = delta * delta;
        for (const auto& d : tdata) {
            Vec2 g = triangle_gradient(d);
            double t = g.norm2() + d2;
            double c1 = d.area * p * std::pow(t, p / 2.0 - 1.0);
            double c2 = d.area * p * (p - 2.0) * (t > 0.0 ? std::pow(t, p / 2.0 - 2.0) : 0.0);
            for (int a = 0; a < 3; ++a) {
                int ia = local_of_vertex[d.v[a]];
                if (ia < 0) continue;
                double ga = g.dot(d.ghat[a]);
                for (int b = 0; b < 3; ++b) {
                    int ib = local_of_vertex[d.v[b]];
                    if (ib < 0) continue;
                    double entry = c1 * d.ghat[a].dot(d.ghat[b]) + c2 * ga * g.dot(d.ghat[b]);
                    trips.emplace_back(ia, ib, entry);
                }
            }
        }
        Eigen::SparseMatrix<double> H(dof_count(), dof_count());
        H.setFromTriplets(trips.begin(), trips.end());
        return H;
    }
};

// Direct solve of the p = 2 normal equations.
std::vector<double> solve_linear_p2(Workspace& ws, std::span<const double> initial) {
    const int n = ws.dof_count();
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const auto& d : ws.tdata) {
        for (int a = 0; a < 3; ++a) {
            int ia = ws.local_of_vertex[d.v[a]];
            if (ia < 0) continue;
            for (int b = 0; b < 3; ++b) {
                double k_ab = d.area * d.ghat[a].dot(d.ghat[b]);
                int ib = ws.local_of_vertex[d.v[b]];
                if (ib >= 0)
                    trips.emplace_back(ia, ib, k_ab);
                else
                    rhs[ia] -= k_ab * ws.value[d.v[b]];
            }
        }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw ConsistencyError("stiffness factorization failed on the p = 2 fast path");
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = initial[i];
    Eigen::VectorXd x = ldlt.solve(rhs);
    return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace

std::pair<double, std::vector<double>>
scalar_energy_and_gradient(const PSolveProblem& problem, std::span<const double> free_values) {
    Workspace ws(problem);
    if (static_cast<int>(free_values.size()) != ws.dof_count())
        throw InvalidArgument("free value count does not match the problem");
    ws.load(free_values);
    Eigen::VectorXd g = ws.gradient();
    return {ws.energy(ws.delta), std::vector<double>(g.data(), g.data() + g.size())};
}

std::pair<std::vector<double>, PSolveReport>
solve_scalar_p_dirichlet(const PSolveProblem& problem, std::span<const double> initial_guess) {
    Workspace ws(problem);
    const int n = ws.dof_count();
    if (static_cast<int>(initial_guess.size()) != n)
        throw InvalidArgument("initial guess length does not match the free vertex count");
    for (double v : initial_guess)
        if (!std::isfinite(v)) throw InvalidArgument("non-finite initial guess");

    PSolveReport report;
    std::vector<double> x(initial_guess.begin(), initial_guess.end());

    if (n == 0) {
        report.converged = true;
        report.energy_trace = {ws.energy(ws.delta)};
        report.final_energy = ws.energy(0.0);
        return {x, report};
    }

    ws.load(x);
    double energy = ws.energy(ws.delta);
    report.energy_trace.push_back(energy);

    if (problem.config.p == 2.0 && problem.config.fast_path_p2) {
        x = solve_linear_p2(ws, initial_guess);
        ws.load(x);
        double solved = ws.energy(ws.delta);
        // The direct solve is the global minimizer; warm starts at the
        // minimizer can differ by roundoff only.
        if (solved <= energy) report.energy_trace.push_back(solved);
        report.iterations = 1;
        Eigen::VectorXd g = ws.gradient();
        report.final_gradient_norm = g.norm();
        report.gradient_threshold = problem.config.tolerance * std::max(g.norm(), 1.0);
        report.converged = true;
        report.final_energy = ws.energy(0.0);
        return {x, report};
    }

    Eigen::VectorXd xe(n);
    for (int i = 0; i < n; ++i) xe[i] = x[i];
    Eigen::VectorXd grad = ws.gradient();
    const double threshold = problem.config.tolerance * grad.norm();
    report.gradient_threshold = threshold;

    int flat_streak = 0;
    bool converged = grad.norm() <= threshold;
    int iter = 0;
    while (!converged && iter < problem.config.max_iterations) {
        ++iter;
        Eigen::SparseMatrix<double> H = ws.hessian();
        Eigen::VectorXd dir;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
        bool have_newton = ldlt.info() == Eigen::Success;
        if (have_newton) {
            dir = ldlt.solve(-grad);
            have_newton = std::isfinite(dir.norm()) && grad.dot(dir) < 0.0;
        }
        if (!have_newton) dir = -grad;  // gradient descent fallback

        // Backtracking line search enforcing energy decrease.
        const double slope = grad.dot(dir);
        double step = 1.0;
        double new_energy = energy;
        Eigen::VectorXd xt;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xt = xe + step * dir;
            for (int i = 0; i < n; ++i) x[i] = xt[i];
            ws.load(x);
            new_energy = ws.energy(ws.delta);
            if (new_energy <= energy + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Cannot decrease along either direction: at a flat valley.
            for (int i = 0; i < n; ++i) x[i] = xe[i];
            ws.load(x);
            converged = true;
            break;
        }
        xe = xt;
        report.energy_trace.push_back(new_energy);
        double decrease = energy - new_energy;
        flat_streak = decrease < 1e-14 * std::max(1.0, std::abs(energy)) ? flat_streak + 1 : 0;
        energy = new_energy;
        grad = ws.gradient();
        if (grad.norm() <= threshold || flat_streak >= 3) converged = true;
    }

    report.iterations = iter;
    report.final_gradient_norm = grad.norm();
    report.converged = converged;
    report.final_energy = ws.energy(0.0);
    if (!converged)
        throw SolveFailure("p-harmonic solve did not converge in " +
                               std::to_string(problem.config.max_iterations) + " iterations",
                           report, x);
    return {x, report};
}

bool maximum_principle_check(std::span<const double> solution, const PSolveProblem& problem) {
    if (problem.fixed_values.empty()) return true;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto [v, val] : problem.fixed_values) {
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    const double slack = 1e-9 * (hi - lo) + 1e-12 * (1.0 + std::abs(hi) + std::abs(lo));
    for (double v : solution)
        if (v < lo - slack || v > hi + slack) return false;
    return true;
}

MapSolveResult solve_map_p_dirichlet(const MeshPtr& mesh,
                                     std::span<const int> region,
                                     const std::vector<std::pair<int, Vec2>>& boundary_values,
                                     double p,
                                     const PSolveConfig& config,
                                     const DiscreteMap* warm_start) {
    if (region.empty()) throw InvalidArgument("map solve needs a nonempty region");
    std::vector<char> in_region(mesh->triangle_count(), 0);
    for (int t : region) {
        if (t < 0 || t >= mesh->triangle_count())
            throw InvalidArgument("bad region triangle " + std::to_string(t));
        in_region[t] = 1;
    }

    // Region vertices; boundary = on a region-boundary edge, the rest free.
    std::vector<char> is_vertex(mesh->vertex_count(), 0), is_boundary(mesh->vertex_count(), 0);
    for (int t : region) {
        const auto& tri = mesh->triangles[t];
        for (int k = 0; k < 3; ++k) {
            is_vertex[tri[k]] = 1;
            int nb = mesh->tri_neighbors[t][k];
            if (nb < 0 || !in_region[nb]) {
                is_boundary[tri[k]] = 1;
                is_boundary[tri[(k + 1) % 3]] = 1;
            }
        }
    }

    std::unordered_map<int, Vec2> prescribed;
    for (const auto& [v, val] : boundary_values) prescribed[v] = val;

    MapSolveResult result;
    std::vector<int> free_vertices;
    for (int v = 0; v < mesh->vertex_count(); ++v) {
        if (!is_vertex[v]) continue;
        result.vertices.push_back(v);
        if (is_boundary[v]) {
            if (!prescribed.count(v))
                throw InvalidArgument("region boundary vertex " + std::to_string(v) +
                                      " has no prescribed value");
        } else {
            free_vertices.push_back(v);
        }
    }

    Vec2 mean{0, 0};
    for (int v : result.vertices)
        if (is_boundary[v]) mean += prescribed.at(v);
    std::size_t boundary_count = result.vertices.size() - free_vertices.size();
    if (boundary_count > 0) mean = mean / static_cast<double>(boundary_count);

    PSolveProblem scalar;
    scalar.mesh = mesh;
    scalar.active_triangles.assign(region.begin(), region.end());
    scalar.free_vertices = free_vertices;
    scalar.config = config;
    scalar.config.p = p;

    auto solve_coordinate = [&](auto pick) -> std::pair<std::vector<double>, PSolveReport> {
        scalar.fixed_values.clear();
        for (int v : result.vertices)
            if (is_boundary[v]) scalar.fixed_values.emplace_back(v, pick(prescribed.at(v)));
        std::vector<double> init(free_vertices.size());
        for (std::size_t i = 0; i < free_vertices.size(); ++i)
            init[i] = warm_start ? pick(warm_start->images[free_vertices[i]]) : pick(mean);
        return solve_scalar_p_dirichlet(scalar, init);
    };

    auto [xu, ru] = solve_coordinate([](const Vec2& v) { return v.x; });
    auto [xv, rv] = solve_coordinate([](const Vec2& v) { return v.y; });
    result.report_u = std::move(ru);
    result.report_v = std::move(rv);

    std::unordered_map<int, Vec2> solved;
    for (std::size_t i = 0; i < free_vertices.size(); ++i)
        solved[free_vertices[i]] = {xu[i], xv[i]};
    result.values.reserve(result.vertices.size());
    for (int v : result.vertices)
        result.values.push_back(is_boundary[v] ? prescribed.at(v) : solved.at(v));
    return result;
}

}  // namespace monomap
