#include "monomap/homeomorphize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "monomap/diagnostics.hpp"
#include "monomap/errors.hpp"
#include "monomap/functionals.hpp"

namespace monomap {

namespace {

double dist_to_box(const Vec2& p, const Box2& box) {
    double dx = std::max({box.lo.x - p.x, 0.0, p.x - box.hi.x});
    double dy = std::max({box.lo.y - p.y, 0.0, p.y - box.hi.y});
    return std::hypot(dx, dy);
}

// Closed boundary walks of a triangle subset, interior on the left. At a
// pinch vertex the continuation hugging the interior sector is taken.
std::vector<std::vector<int>> subset_boundary_loops(const TriangleMesh& mesh,
                                                    const std::vector<int>& subset) {
    std::vector<char> in_set(mesh.triangle_count(), 0);
    for (int t : subset) in_set[t] = 1;

    std::map<int, std::vector<int>> outgoing;  // a -> list of b with boundary edge (a, b)
    for (int t : subset) {
        for (int k = 0; k < 3; ++k) {
            int nb = mesh.tri_neighbors[t][k];
            if (nb >= 0 && in_set[nb]) continue;
            int a = mesh.triangles[t][k];
            int b = mesh.triangles[t][(k + 1) % 3];
            outgoing[a].push_back(b);
        }
    }
    for (auto& [a, list] : outgoing) std::sort(list.begin(), list.end());

    std::vector<std::vector<int>> loops;
    std::map<int, std::vector<int>> remaining = outgoing;
    while (!remaining.empty()) {
        int start = remaining.begin()->first;
        std::vector<int> loop;
        int prev = -1, v = start;
        while (true) {
            auto it = remaining.find(v);
            if (it == remaining.end() || it->second.empty())
                throw ConsistencyError("pre-cell boundary walk broke at vertex " + std::to_string(v));
            int chosen_idx = 0;
            if (it->second.size() > 1 && prev >= 0) {
                // Smallest clockwise turn from the reversed incoming direction.
                Vec2 u = (mesh.vertices[prev] - mesh.vertices[v]).normalized();
                double best = 1e300;
                for (std::size_t c = 0; c < it->second.size(); ++c) {
                    Vec2 w = (mesh.vertices[it->second[c]] - mesh.vertices[v]).normalized();
                    double ang = std::atan2(u.cross(w), u.dot(w));  // (-pi, pi]
                    if (ang <= 1e-12) ang += 2.0 * M_PI;            // clockwise-positive order
                    double cw = 2.0 * M_PI - ang;
                    if (cw < best) {
                        best = cw;
                        chosen_idx = static_cast<int>(c);
                    }
                }
            }
            int next = it->second[chosen_idx];
            it->second.erase(it->second.begin() + chosen_idx);
            if (it->second.empty()) remaining.erase(it);
            loop.push_back(v);
            prev = v;
            v = next;
            if (v == start && (remaining.find(v) == remaining.end())) break;
            if (v == start) break;  // close here; remaining edges at start form another loop
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<int> largest_component(const TriangleMesh& mesh, const std::vector<int>& candidates) {
    auto comps = connected_components(mesh, candidates);
    if (comps.empty()) return {};
    std::size_t best = 0;
    for (std::size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[best].size()) best = i;  // ties keep the lowest-index comp
    return comps[best];
}

// Absorb complement islands that do not reach the mesh boundary.
std::vector<int> fill_enclosed(const TriangleMesh& mesh, std::vector<int> subset) {
    std::vector<char> in_set(mesh.triangle_count(), 0);
    for (int t : subset) in_set[t] = 1;
    std::vector<int> complement;
    complement.reserve(mesh.triangle_count() - subset.size());
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (!in_set[t]) complement.push_back(t);
    for (const auto& comp : connected_components(mesh, complement)) {
        bool touches_mesh_boundary = false;
        for (int t : comp) {
            for (int k = 0; k < 3 && !touches_mesh_boundary; ++k)
                if (mesh.tri_neighbors[t][k] < 0) touches_mesh_boundary = true;
            if (touches_mesh_boundary) break;
        }
        if (!touches_mesh_boundary) subset.insert(subset.end(), comp.begin(), comp.end());
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

double positive_fmod(double x, double m) {
    double r = std::fmod(x, m);
    return r < 0.0 ? r + m : r;
}

}  // namespace

PreCell compute_precell(const DiscreteMap& map, const Cell& cell, const PolygonalDomain& target) {
    (void)target;  // membership is purely against the (extended) square
    const TriangleMesh& mesh = *map.mesh;
    PreCell pre;
    pre.kind = cell.kind;

    Box2 box = cell.kind == Cell::Kind::boundary ? cell.extended_box() : cell.box();
    const double tol = 1e-9 * cell.side();

    std::vector<int> candidates;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (box.contains(map.images[tri[0]], tol) && box.contains(map.images[tri[1]], tol) &&
            box.contains(map.images[tri[2]], tol))
            candidates.push_back(t);
    }
    if (candidates.empty()) return pre;

    pre.triangles = fill_enclosed(mesh, largest_component(mesh, candidates));

    auto loops = subset_boundary_loops(mesh, pre.triangles);
    if (loops.empty()) {
        pre.degenerate = true;  // subset covers a closed mesh; not expected here
        return pre;
    }
    std::size_t longest = 0;
    for (std::size_t i = 1; i < loops.size(); ++i)
        if (loops[i].size() > loops[longest].size()) longest = i;
    pre.degenerate = loops.size() > 1;
    pre.boundary_walk = std::move(loops[longest]);

    // Deterministic start.
    auto min_it = std::min_element(pre.boundary_walk.begin(), pre.boundary_walk.end());
    std::rotate(pre.boundary_walk.begin(), min_it, pre.boundary_walk.end());

    pre.boundary_vertices = pre.boundary_walk;
    std::sort(pre.boundary_vertices.begin(), pre.boundary_vertices.end());
    pre.boundary_vertices.erase(std::unique(pre.boundary_vertices.begin(), pre.boundary_vertices.end()),
                                pre.boundary_vertices.end());
    return pre;
}

TraceRepair repair_boundary_trace(std::span<const Vec2> trace,
                                  std::span<const double> source_arclengths,
                                  const Cell& cell,
                                  const PolygonalDomain& target,
                                  double order_slack_fraction,
                                  std::span<const char> protected_mask) {
    (void)target;  // the cell carries its region polygon
    const std::size_t n = trace.size();
    if (n < 3) throw InvalidArgument("boundary trace needs at least 3 vertices");
    if (source_arclengths.size() != n)
        throw InvalidArgument("trace needs one source arclength per edge");
    if (cell.region.size() < 3) throw InvalidArgument("cell has no region polygon");
    if (!(order_slack_fraction > 0.0 && order_slack_fraction < 1.0))
        throw InvalidArgument("order slack fraction must lie in (0, 1)");

    Box2 reach = cell.kind == Cell::Kind::boundary ? cell.extended_box() : cell.box();
    for (const Vec2& q : trace)
        if (dist_to_box(q, reach) > cell.epsilon)
            throw ConsistencyError("trace value lies farther than epsilon from the cell");

    ClosedPolyline curve(cell.region);
    const double L = curve.total_length;

    double total_src = 0.0;
    for (double s : source_arclengths) {
        if (!(s >= 0.0)) throw InvalidArgument("source arclengths must be nonnegative");
        total_src += s;
    }
    if (!(total_src > 0.0)) throw InvalidArgument("degenerate source boundary loop");

    std::vector<double> t(n), off_curve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [param, d] = curve.project(trace[i]);
        t[i] = param;
        off_curve[i] = d;
    }

    TraceRepair repair;
    repair.values.assign(trace.begin(), trace.end());

    const double dist_tol = 1e-9 * cell.side();

    // Unrolled parameters and winding of the raw trace.
    std::vector<double> u(n);
    u[0] = t[0];
    for (std::size_t i = 1; i < n; ++i) {
        double step = positive_fmod(t[i] - t[i - 1] + 0.5 * L, L) - 0.5 * L;
        u[i] = u[i - 1] + step;
    }
    double closing = positive_fmod(t[0] - t[n - 1] + 0.5 * L, L) - 0.5 * L;
    long winding = std::lround((u[n - 1] + closing - u[0]) / L);

    // Defective vertices: members of collapsed runs (beyond the first, which
    // anchors the run), order violations past the slack, and values outside
    // the closed region. Everything else keeps its exact value.
    if (!protected_mask.empty() && protected_mask.size() != n)
        throw InvalidArgument("protected mask length does not match the trace");
    auto is_protected = [&](std::size_t i) {
        return !protected_mask.empty() && protected_mask[i] != 0;
    };

    // 1 = collapsed (congested), 2 = order violation or out of region.
    // A vertex is congested when its image spacing falls far below its
    // source-arclength entitlement: the map has (nearly) collapsed there and
    // the trace must be reopened; exactly stacked values are the limit case.
    std::vector<char> moved(n, 0);
    const double congestion = 0.25;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_protected(i)) continue;
        std::size_t prev = (i + n - 1) % n;
        double s_img = 0.5 * (dist(trace[i], trace[prev]) + dist(trace[i], trace[(i + 1) % n]));
        double s_ent = 0.5 * (source_arclengths[prev] + source_arclengths[i]) / total_src * L;
        if (s_ent > 0.0 && s_img < congestion * s_ent) moved[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!moved[i] && off_curve[i] > dist_tol && !point_in_polygon(trace[i], cell.region))
            moved[i] = 2;

    const double slack = order_slack_fraction * L;
    double running = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        if (moved[i]) continue;
        if (running != -1e300 && running - u[i] > slack && !is_protected(i)) {
            moved[i] = 2;  // genuine backtrack, not projection noise
            continue;
        }
        running = std::max(running == -1e300 ? u[i] : running, u[i]);
    }

    // Monotone anchor parameters: running max of the unrolled parameter over
    // kept vertices, walked once around from the first kept index.
    std::vector<double> anchor_param(n, 0.0);
    std::size_t first_kept = n;
    auto refresh_anchors = [&]() {
        first_kept = 0;
        while (first_kept < n && moved[first_kept]) ++first_kept;
        if (first_kept == n) return;
        double frame = u[first_kept];
        for (std::size_t s = 0; s < n; ++s) {
            std::size_t i = (first_kept + s) % n;
            if (moved[i]) continue;
            frame = std::max(frame, u[i] + (i < first_kept ? L : 0.0));
            anchor_param[i] = frame;
        }
    };

    // Pooling: a collapsed run must end up with parameter room comparable to
    // its source share. While a run is squeezed below that, absorb its
    // bracketing anchors (protected vertices are never absorbed).
    if (winding == 1) {
        for (std::size_t round = 0; round <= n; ++round) {
            refresh_anchors();
            if (first_kept == n) break;
            bool changed = false;
            std::size_t i = first_kept;
            do {
                std::size_t next = (i + 1) % n;
                if (!moved[next]) {
                    i = next;
                    continue;
                }
                std::size_t j = next;
                double ent = source_arclengths[i];
                bool has_collapsed = false;
                while (moved[j]) {
                    has_collapsed = has_collapsed || moved[j] == 1;
                    ent += source_arclengths[j];
                    j = (j + 1) % n;
                }
                double left = anchor_param[i];
                double right = j == first_kept ? u[first_kept] + L : anchor_param[j];
                if (has_collapsed && right - left < congestion * ent / total_src * L) {
                    if (!is_protected(i)) {
                        moved[i] = 1;
                        changed = true;
                    }
                    if (!is_protected(j)) {
                        moved[j] = 1;
                        changed = true;
                    }
                }
                if (j == first_kept) break;
                i = j;
            } while (i != first_kept);
            if (!changed) break;
        }
    }

    std::size_t anchors = 0;
    for (std::size_t i = 0; i < n; ++i) anchors += moved[i] ? 0 : 1;

    if (winding != 1 || anchors < 3) {
        // No usable cyclic structure (fully collapsed or tangled): rebuild the
        // whole trace around the curve by source-arclength proportion.
        repair.redistributed = true;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            repair.values[i] = curve.at(t[0] + L * acc / total_src);
            acc += source_arclengths[i];
        }
    } else {
        refresh_anchors();
        // Place each run of moved vertices between its kept anchors by
        // source-arclength proportion.
        std::size_t i = first_kept;
        do {
            std::size_t next = (i + 1) % n;
            if (!moved[next]) {
                i = next;
                continue;
            }
            std::vector<std::size_t> run;
            std::size_t j = next;
            while (moved[j]) {
                run.push_back(j);
                j = (j + 1) % n;
            }
            double left = anchor_param[i];
            double right = j == first_kept ? u[first_kept] + L : anchor_param[j];
            if (right - left < 1e-12 * L) right = left + 1e-12 * L;
            double span_src = source_arclengths[i];
            for (std::size_t m : run) span_src += source_arclengths[m];
            // Collapsed members spread by source-arclength proportion across
            // the anchor gap; order violations clamp to the least admissible
            // parameter instead, keeping their displacement minimal.
            double acc = source_arclengths[i];
            double prev = left;
            for (std::size_t m : run) {
                double proportional = left + (right - left) * acc / span_src;
                double w = moved[m] == 1 ? proportional
                                         : std::clamp(u[m] + (u[m] < left - 0.5 * L ? L : 0.0),
                                                      prev + 1e-12 * L, proportional);
                w = std::min(std::max(w, prev + 1e-15 * L), right - 1e-15 * L);
                repair.values[m] = curve.at(w);
                prev = w;
                acc += source_arclengths[m];
            }
            i = j;
        } while (i != first_kept);
    }

    for (std::size_t i = 0; i < n; ++i)
        repair.magnitude = std::max(repair.magnitude, dist(repair.values[i], trace[i]));
    return repair;
}

std::pair<DiscreteMap, ChainStep> replace_on_precell(const DiscreteMap& map,
                                                     const PreCell& precell,
                                                     const Cell& cell,
                                                     const PolygonalDomain& target,
                                                     double p,
                                                     const ChainConfig& config) {
    ChainStep step;
    step.precell_size = static_cast<int>(precell.triangles.size());
    if (precell.triangles.empty() || precell.degenerate) {
        step.skipped = true;
        return {map, step};
    }

    step.energy_before = energy_aniso(map, p).total;

    const auto& walk = precell.boundary_walk;
    const std::size_t n = walk.size();
    std::vector<Vec2> trace(n);
    std::vector<double> arclens(n);
    std::vector<char> pinned(n, 0);  // domain-boundary vertices own the external face
    for (std::size_t i = 0; i < n; ++i) {
        trace[i] = map.images[walk[i]];
        arclens[i] = dist(map.mesh->vertices[walk[i]], map.mesh->vertices[walk[(i + 1) % n]]);
        pinned[i] = map.mesh->vertex_on_boundary[walk[i]] ? 1 : 0;
    }

    TraceRepair repair =
        repair_boundary_trace(trace, arclens, cell, target, config.trace_order_slack, pinned);
    step.boundary_repair_magnitude = repair.magnitude;

    DiscreteMap repaired = map;
    std::vector<char> seen(map.mesh->vertex_count(), 0);
    std::vector<std::pair<int, Vec2>> boundary_values;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[walk[i]]) continue;  // pinched walks fix the first occurrence
        seen[walk[i]] = 1;
        repaired.images[walk[i]] = repair.values[i];
        boundary_values.emplace_back(walk[i], repair.values[i]);
    }
    step.repair_energy_delta = energy_aniso(repaired, p).total - step.energy_before;

    MapSolveResult solved = solve_map_p_dirichlet(map.mesh, precell.triangles, boundary_values, p,
                                                  config.solver, &repaired);

    DiscreteMap out = std::move(repaired);
    for (std::size_t i = 0; i < solved.vertices.size(); ++i)
        out.images[solved.vertices[i]] = solved.values[i];

    step.energy_after = energy_aniso(out, p).total;
    for (std::size_t v = 0; v < out.images.size(); ++v)
        step.sup_displacement = std::max(step.sup_displacement, dist(out.images[v], map.images[v]));

    // Interior Jacobian census: triangles with at least one solved vertex.
    // Triangles pinned entirely to the boundary trace lie outside the
    // interior-positivity property and are excluded.
    auto diffs = triangle_differentials(out);
    double max_abs = 0.0;
    for (int t : precell.triangles) max_abs = std::max(max_abs, std::abs(diffs[t].jacobian));
    const double jac_tol = 1e-12 * std::max(1.0, max_abs);
    std::vector<char> fixed(map.mesh->vertex_count(), 0);
    for (int v : precell.boundary_vertices) fixed[v] = 1;
    for (int t : precell.triangles) {
        const auto& tri = map.mesh->triangles[t];
        if (fixed[tri[0]] && fixed[tri[1]] && fixed[tri[2]]) continue;
        double j = diffs[t].jacobian;
        if (std::abs(j) <= jac_tol)
            ++step.rkc_zero;
        else if (j < 0.0)
            ++step.rkc_negative;
    }
    return {std::move(out), step};
}

std::pair<DiscreteMap, ChainReport> homeomorphize_chain(const DiscreteMap& map,
                                                        const PolygonalDomain& target,
                                                        const CellCover& cover,
                                                        double p,
                                                        const ChainConfig& config) {
    if (!(p > 1.0)) throw InvalidArgument("chain needs p > 1");
    if (config.check_monotonicity) {
        MonotonicityReport mono = check_monotone_fibers(map, target, config.monotone_sample_grid);
        if (!mono.pass) {
            std::string points;
            for (std::size_t i = 0; i < mono.failing_points.size() && i < 5; ++i)
                points += " (" + std::to_string(mono.failing_points[i].x) + ", " +
                          std::to_string(mono.failing_points[i].y) + ")";
            throw InvalidArgument("input map is not discrete-monotone; disconnected fibers at" +
                                  points);
        }
    }

    ChainReport report;
    report.epsilon = cover.epsilon;
    report.p = p;
    report.input_energy = energy_aniso(map, p).total;

    DiscreteMap current = map;
    for (std::size_t i = 0; i < cover.cells.size(); ++i) {
        PreCell pre = compute_precell(current, cover.cells[i], target);
        try {
            auto [next, step] = replace_on_precell(current, pre, cover.cells[i], target, p, config);
            step.cell_index = static_cast<int>(i);
            report.total_repair_magnitude += step.boundary_repair_magnitude;
            report.total_repair_energy_delta += step.repair_energy_delta;
            report.steps.push_back(step);
            current = std::move(next);
        } catch (const SolveFailure& failure) {
            throw ChainFailure("chain aborted at cell " + std::to_string(i) + ": " + failure.what(),
                               std::move(report));
        }
    }

    report.final_energy = energy_aniso(current, p).total;
    for (std::size_t v = 0; v < current.images.size(); ++v)
        report.final_sup_distance_to_input =
            std::max(report.final_sup_distance_to_input, dist(current.images[v], map.images[v]));
    report.royden_distance_to_input = w1p_distance(current, map, p);

    OrientationCensus census = check_orientation(current);
    report.jacobian_positive = census.positive;
    report.jacobian_zero = census.zero;
    report.jacobian_negative = census.negative;
    report.injective = config.run_injectivity_check ? check_injectivity(current).injective
                                                    : census.zero == 0 && census.negative == 0;
    return {std::move(current), report};
}

std::vector<std::pair<DiscreteMap, ChainReport>> approximation_sequence(
    const DiscreteMap& map,
    const PolygonalDomain& target,
    double p,
    std::span<const double> epsilons,
    const ChainConfig& config) {
    if (epsilons.empty()) throw InvalidArgument("approximation sequence needs at least one epsilon");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw InvalidArgument("epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw InvalidArgument("epsilons must be strictly decreasing");
    }
    std::vector<std::pair<DiscreteMap, ChainReport>> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        CellCover cover = build_cell_cover(target, eps, config.cover);
        out.push_back(homeomorphize_chain(map, target, cover, p, config));
    }
    return out;
}

}  // namespace monomap
