#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "monomap/errors.hpp"
#include "monomap/io.hpp"
#include "monomap/oracle.hpp"
#include "monomap/svg.hpp"

namespace {

using namespace monomap;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    long seed = 0;
    std::optional<double> p, epsilon, tolerance;
};

json load_config(const CommonArgs& args) {
    json cfg = json::object();
    if (!args.config_path.empty()) cfg = load_json_file(args.config_path);
    if (args.p) cfg["p"] = *args.p;
    if (args.epsilon) cfg["epsilon"] = *args.epsilon;
    if (args.tolerance) {
        if (!cfg.contains("solver")) cfg["solver"] = json::object();
        cfg["solver"]["tolerance"] = *args.tolerance;
    }
    return cfg;
}

PSolveConfig solver_from_config(const json& cfg, double p) {
    PSolveConfig sc;
    sc.p = p;
    if (cfg.contains("solver")) {
        const json& s = cfg["solver"];
        if (s.contains("tolerance")) sc.tolerance = s["tolerance"].get<double>();
        if (s.contains("max_iterations")) sc.max_iterations = s["max_iterations"].get<int>();
        if (s.contains("delta")) sc.regularization_delta = s["delta"].get<double>();
        if (s.contains("fast_path_p2")) sc.fast_path_p2 = s["fast_path_p2"].get<bool>();
    }
    return sc;
}

ChainConfig chain_from_config(const json& cfg, double p) {
    ChainConfig cc;
    cc.solver = solver_from_config(cfg, p);
    if (cfg.contains("cover")) {
        const json& c = cfg["cover"];
        if (c.contains("overlap_fraction")) cc.cover.overlap_fraction = c["overlap_fraction"].get<double>();
        if (c.contains("max_cells")) cc.cover.max_cells = c["max_cells"].get<int>();
    }
    if (cfg.contains("check_monotonicity")) cc.check_monotonicity = cfg["check_monotonicity"].get<bool>();
    return cc;
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& cfg,
                    long seed, double wall_seconds) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = cfg;
    manifest["seed"] = seed;
    manifest["version"] = kVersion;
    manifest["wall_time_s"] = wall_seconds;
    save_json_file(out_dir + "/manifest.json", manifest);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

MeshPtr require_mesh(const std::string& path) { return mesh_from_json(load_json_file(path)); }

DiscreteMap require_map(const std::string& path, MeshPtr mesh) {
    return map_from_json(load_json_file(path), std::move(mesh));
}

int run_solve(const CommonArgs& args, const std::string& mesh_path, const std::string& map_path) {
    Timer timer;
    json cfg = load_config(args);
    double p = cfg.value("p", 2.0);
    MeshPtr mesh = require_mesh(mesh_path);
    DiscreteMap data = require_map(map_path, mesh);

    std::vector<int> region(mesh->triangle_count());
    for (int t = 0; t < mesh->triangle_count(); ++t) region[t] = t;
    std::vector<std::pair<int, Vec2>> boundary;
    for (int v = 0; v < mesh->vertex_count(); ++v)
        if (mesh->vertex_on_boundary[v]) boundary.emplace_back(v, data.images[v]);

    MapSolveResult result =
        solve_map_p_dirichlet(mesh, region, boundary, p, solver_from_config(cfg, p), &data);

    DiscreteMap solution = data;
    for (std::size_t i = 0; i < result.vertices.size(); ++i)
        solution.images[result.vertices[i]] = result.values[i];

    fs::create_directories(args.out_dir);
    save_json_file(args.out_dir + "/solution_map.json", map_to_json(solution));
    json reports;
    reports["u"] = psolve_report_to_json(result.report_u);
    reports["v"] = psolve_report_to_json(result.report_v);
    save_json_file(args.out_dir + "/solve_report.json", reports);
    write_manifest(args.out_dir, "solve", cfg, args.seed, timer.seconds());
    bool converged = result.report_u.converged && result.report_v.converged;
    std::cout << "solve: " << (converged ? "converged" : "NOT converged") << ", energy "
              << result.report_u.final_energy + result.report_v.final_energy << "\n";
    return converged ? 0 : 1;
}

int run_energy(const CommonArgs& args, const std::string& mesh_path, const std::string& map_path,
               const std::string& kind) {
    Timer timer;
    json cfg = load_config(args);
    double p = cfg.value("p", 2.0);
    DiscreteMap map = require_map(map_path, require_mesh(mesh_path));
    fs::create_directories(args.out_dir);
    json out;
    if (kind == "aniso" || kind == "all") out["aniso"] = energy_report_to_json(energy_aniso(map, p));
    if (kind == "iso" || kind == "all") out["iso"] = energy_report_to_json(energy_iso(map, p));
    if (kind == "neohookean" || kind == "all") {
        try {
            out["neohookean"] = energy_report_to_json(energy_neohookean(map));
        } catch (const OrientationError& e) {
            out["neohookean"] = {{"error", e.what()}};
        }
    }
    save_json_file(args.out_dir + "/energy.json", out);
    write_manifest(args.out_dir, "energy", cfg, args.seed, timer.seconds());
    for (auto& [name, report] : out.items())
        if (report.contains("total"))
            std::cout << name << ": " << report["total"].dump() << "\n";
    return 0;
}

int run_cover(const CommonArgs& args, const std::string& domain_path) {
    Timer timer;
    json cfg = load_config(args);
    if (!cfg.contains("epsilon")) throw InvalidArgument("cover needs --epsilon or config epsilon");
    PolygonalDomain domain = domain_from_json(load_json_file(domain_path));
    ChainConfig cc = chain_from_config(cfg, 2.0);
    CellCover cover = build_cell_cover(domain, cfg["epsilon"].get<double>(), cc.cover);
    CoverVerification v = verify_cover(cover, domain);
    fs::create_directories(args.out_dir);
    save_json_file(args.out_dir + "/cover.json", cover_to_json(cover));
    save_json_file(args.out_dir + "/cover_verification.json", cover_verification_to_json(v));
    write_manifest(args.out_dir, "cover", cfg, args.seed, timer.seconds());
    std::cout << "cover: " << cover.cells.size() << " cells, side " << cover.side
              << ", multiplicity " << cover.multiplicity << ", " << (v.pass ? "pass" : "FAIL")
              << "\n";
    return v.pass ? 0 : 1;
}

int run_homeomorphize(const CommonArgs& args, const std::string& mesh_path,
                      const std::string& map_path, const std::string& domain_path, bool svg) {
    Timer timer;
    json cfg = load_config(args);
    double p = cfg.value("p", 2.0);
    if (!cfg.contains("epsilon"))
        throw InvalidArgument("homeomorphize needs --epsilon or config epsilon");
    DiscreteMap map = require_map(map_path, require_mesh(mesh_path));
    PolygonalDomain domain = domain_from_json(load_json_file(domain_path));
    ChainConfig cc = chain_from_config(cfg, p);
    CellCover cover = build_cell_cover(domain, cfg["epsilon"].get<double>(), cc.cover);
    auto [result, report] = homeomorphize_chain(map, domain, cover, p, cc);

    fs::create_directories(args.out_dir);
    save_json_file(args.out_dir + "/final_map.json", map_to_json(result));
    save_json_file(args.out_dir + "/chain_report.json", chain_report_to_json(report));
    save_json_file(args.out_dir + "/cover.json", cover_to_json(cover));
    if (svg) {
        SvgOptions opts;
        opts.title = "homeomorphized map";
        save_svg(args.out_dir + "/summary.svg", result, opts);
    }
    write_manifest(args.out_dir, "homeomorphize", cfg, args.seed, timer.seconds());
    std::cout << "chain: " << report.steps.size() << " steps, energy " << report.input_energy
              << " -> " << report.final_energy << ", sup distance "
              << report.final_sup_distance_to_input << ", "
              << (report.injective ? "injective" : "NOT injective") << "\n";
    return report.injective ? 0 : 1;
}

int run_sequence(const CommonArgs& args, const std::string& mesh_path, const std::string& map_path,
                 const std::string& domain_path, std::vector<double> epsilons, bool svg) {
    Timer timer;
    json cfg = load_config(args);
    double p = cfg.value("p", 2.0);
    DiscreteMap map = require_map(map_path, require_mesh(mesh_path));
    PolygonalDomain domain = domain_from_json(load_json_file(domain_path));
    ChainConfig cc = chain_from_config(cfg, p);
    auto results = approximation_sequence(map, domain, p, epsilons, cc);
    fs::create_directories(args.out_dir);
    json summary = json::array();
    bool all_injective = true;
    for (std::size_t j = 0; j < results.size(); ++j) {
        std::string dir = args.out_dir + "/step_" + std::to_string(j);
        fs::create_directories(dir);
        save_json_file(dir + "/final_map.json", map_to_json(results[j].first));
        save_json_file(dir + "/chain_report.json", chain_report_to_json(results[j].second));
        if (svg) save_svg(dir + "/summary.svg", results[j].first);
        summary.push_back({{"epsilon", results[j].second.epsilon},
                           {"royden_distance", results[j].second.royden_distance_to_input},
                           {"sup_distance", results[j].second.final_sup_distance_to_input},
                           {"injective", results[j].second.injective}});
        all_injective = all_injective && results[j].second.injective;
    }
    save_json_file(args.out_dir + "/sequence.json", summary);
    write_manifest(args.out_dir, "sequence", cfg, args.seed, timer.seconds());
    std::cout << "sequence: " << results.size() << " runs, "
              << (all_injective ? "all injective" : "NOT all injective") << "\n";
    return all_injective ? 0 : 1;
}

int run_check(const CommonArgs& args, const std::string& mesh_path, const std::string& map_path,
              const std::string& domain_path) {
    Timer timer;
    json cfg = load_config(args);
    DiscreteMap map = require_map(map_path, require_mesh(mesh_path));

    OrientationCensus census = check_orientation(map);
    InjectivityReport inj = check_injectivity(map);
    fs::create_directories(args.out_dir);
    json out;
    out["orientation"] = orientation_census_to_json(census);
    out["injectivity"] = injectivity_report_to_json(inj);
    bool pass = inj.injective;

    std::cout << "orientation: +" << census.positive << " / 0:" << census.zero << " / -"
              << census.negative << "\n";
    std::cout << "injectivity: " << (inj.injective ? "pass" : "FAIL") << " ("
              << inj.overlap_witnesses.size() << " overlap witnesses)\n";

    if (!domain_path.empty()) {
        PolygonalDomain domain = domain_from_json(load_json_file(domain_path));
        MonotonicityReport mono = check_monotone_fibers(map, domain, cfg.value("sample_grid", 64));
        out["monotonicity"] = monotonicity_report_to_json(mono);
        std::cout << "monotone fibers: " << (mono.pass ? "pass" : "FAIL") << " (delta "
                  << mono.delta << ")\n";
        pass = pass && mono.pass;
    }
    save_json_file(args.out_dir + "/check.json", out);
    write_manifest(args.out_dir, "check", cfg, args.seed, timer.seconds());
    return pass ? 0 : 1;
}

int run_oracle(const CommonArgs& args, double r, double R, const std::string& which,
               const std::string& mesh_path, bool svg) {
    Timer timer;
    json cfg = load_config(args);
    AnnulusPair pair(r, R);
    auto [A, B] = folded_coeffs(pair);
    fs::create_directories(args.out_dir);

    json out;
    out["r"] = pair.r;
    out["R"] = pair.R;
    out["target_inner"] = pair.target_inner();
    out["target_outer"] = pair.target_outer();
    out["A"] = A;
    out["B"] = B;
    out["folding_radius"] = folding_radius(pair);
    out["energy"] = {
        {"nitsche_inner", closed_form_dirichlet_energy(pair, ClosedFormEnergy::nitsche_inner_part)},
        {"nitsche_outer", closed_form_dirichlet_energy(pair, ClosedFormEnergy::nitsche_outer_part)},
        {"nitsche_total", closed_form_dirichlet_energy(pair, ClosedFormEnergy::nitsche_total)},
        {"folded", closed_form_dirichlet_energy(pair, ClosedFormEnergy::folded)}};
    save_json_file(args.out_dir + "/oracle.json", out);

    if (!mesh_path.empty() && which != "coeffs") {
        MeshPtr mesh = require_mesh(mesh_path);
        OracleMap formula = which == "folded" ? OracleMap::folded
                            : which == "identity" ? OracleMap::identity
                                                  : OracleMap::nitsche;
        DiscreteMap sampled = sample_map_on_mesh(formula, mesh, pair);
        save_json_file(args.out_dir + "/sampled_map.json", map_to_json(sampled));
        if (svg) {
            SvgOptions opts;
            opts.title = which + " map";
            if (which == "folded") opts.fold_circle = folding_radius(pair);
            save_svg(args.out_dir + "/sampled_map.svg", sampled, opts);
        }
    }
    write_manifest(args.out_dir, "oracle", cfg, args.seed, timer.seconds());
    std::cout << "oracle: A = " << A << ", B = " << B << ", fold radius = " << folding_radius(pair)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar monotone-map toolkit: p-harmonic solves, energies, cell covers, "
                 "homeomorphization chains and diagnostics"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string mesh_path, map_path, domain_path, kind = "all", which = "nitsche";
    std::vector<double> epsilons;
    double r = 0.5, R = 2.0;
    bool svg = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "JSON config file");
        cmd->add_option("--out", common.out_dir, "output directory");
        cmd->add_option("--seed", common.seed, "seed recorded in the manifest");
        cmd->add_option("--p", common.p, "energy exponent");
        cmd->add_option("--epsilon", common.epsilon, "cell diameter bound");
        cmd->add_option("--tolerance", common.tolerance, "solver gradient tolerance");
    };

    CLI::App* solve = app.add_subcommand("solve", "coordinate-wise p-harmonic Dirichlet solve");
    solve->add_option("--mesh", mesh_path, "mesh JSON")->required();
    solve->add_option("--map", map_path, "map JSON supplying boundary values")->required();
    add_common(solve);

    CLI::App* energy = app.add_subcommand("energy", "energy functionals of a map");
    energy->add_option("--mesh", mesh_path)->required();
    energy->add_option("--map", map_path)->required();
    energy->add_option("--kind", kind, "aniso | iso | neohookean | all");
    add_common(energy);

    CLI::App* cover = app.add_subcommand("cover", "build and verify a square cell cover");
    cover->add_option("--domain", domain_path)->required();
    add_common(cover);

    CLI::App* homeo = app.add_subcommand("homeomorphize", "run the replacement chain");
    homeo->add_option("--mesh", mesh_path)->required();
    homeo->add_option("--map", map_path)->required();
    homeo->add_option("--domain", domain_path)->required();
    homeo->add_flag("--svg", svg, "emit a summary SVG");
    add_common(homeo);

    CLI::App* sequence = app.add_subcommand("sequence", "chain runs over decreasing epsilons");
    sequence->add_option("--mesh", mesh_path)->required();
    sequence->add_option("--map", map_path)->required();
    sequence->add_option("--domain", domain_path)->required();
    sequence->add_option("--epsilons", epsilons, "decreasing list")->required()->delimiter(',');
    sequence->add_flag("--svg", svg);
    add_common(sequence);

    CLI::App* check = app.add_subcommand("check", "orientation, injectivity and fiber checks");
    check->add_option("--mesh", mesh_path)->required();
    check->add_option("--map", map_path)->required();
    check->add_option("--domain", domain_path, "target domain for the fiber check");
    add_common(check);

    CLI::App* oracle = app.add_subcommand("oracle", "closed-form reference maps and energies");
    oracle->add_option("--r", r, "inner source radius");
    oracle->add_option("--R", R, "outer source radius");
    oracle->add_option("--which", which, "nitsche | folded | identity | coeffs");
    oracle->add_option("--mesh", mesh_path, "sample the map on this mesh");
    oracle->add_flag("--svg", svg);
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(common, mesh_path, map_path);
        if (energy->parsed()) return run_energy(common, mesh_path, map_path, kind);
        if (cover->parsed()) return run_cover(common, domain_path);
        if (homeo->parsed())
            return run_homeomorphize(common, mesh_path, map_path, domain_path, svg);
        if (sequence->parsed())
            return run_sequence(common, mesh_path, map_path, domain_path, epsilons, svg);
        if (check->parsed()) return run_check(common, mesh_path, map_path, domain_path);
        if (oracle->parsed()) return run_oracle(common, r, R, which, mesh_path, svg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolveFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const ChainFailure& e) {
        std::cerr << "chain failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
