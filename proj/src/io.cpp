#include "monomap/io.hpp"

#include <fstream>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

namespace {

Vec2 point_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a [x, y] pair", where);
    return {j[0].get<double>(), j[1].get<double>()};
}

json point_to_json(const Vec2& p) { return json::array({p.x, p.y}); }

std::vector<Vec2> ring_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError("expected an array of points", where);
    std::vector<Vec2> ring;
    for (std::size_t i = 0; i < j.size(); ++i)
        ring.push_back(point_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return ring;
}

json ring_to_json(const std::vector<Vec2>& ring) {
    json out = json::array();
    for (const Vec2& p : ring) out.push_back(point_to_json(p));
    return out;
}

}  // namespace

json mesh_to_json(const TriangleMesh& mesh) {
    json j;
    j["vertices"] = ring_to_json(mesh.vertices);
    json tris = json::array();
    for (const auto& t : mesh.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
    j["triangles"] = tris;
    return j;
}

MeshPtr mesh_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("mesh file must hold an object", "mesh");
    if (!j.contains("vertices")) throw ParseError("missing field", "mesh.vertices");
    if (!j.contains("triangles")) throw ParseError("missing field", "mesh.triangles");
    std::vector<Vec2> vertices = ring_from_json(j["vertices"], "mesh.vertices");
    const json& jt = j["triangles"];
    if (!jt.is_array()) throw ParseError("expected an array of index triples", "mesh.triangles");
    std::vector<std::array<int, 3>> triangles;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        std::string where = "mesh.triangles[" + std::to_string(i) + "]";
        const json& tri = jt[i];
        if (!tri.is_array() || tri.size() != 3)
            throw ParseError("expected an index triple", where);
        std::array<int, 3> t;
        for (int k = 0; k < 3; ++k) {
            if (!tri[k].is_number_integer())
                throw ParseError("expected an integer vertex index", where + "[" + std::to_string(k) + "]");
            long v = tri[k].get<long>();
            if (v < 0 || v >= static_cast<long>(vertices.size()))
                throw ParseError("vertex index " + std::to_string(v) + " out of range",
                                 where + "[" + std::to_string(k) + "]");
            t[k] = static_cast<int>(v);
        }
        triangles.push_back(t);
    }
    try {
        return TriangleMesh::build(std::move(vertices), std::move(triangles));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), "mesh");
    }
}

json map_to_json(const DiscreteMap& map) {
    json j;
    j["images"] = ring_to_json(map.images);
    return j;
}

DiscreteMap map_from_json(const json& j, MeshPtr mesh) {
    if (!j.is_object() || !j.contains("images"))
        throw ParseError("map file must hold {\"images\": [...]}", "map.images");
    std::vector<Vec2> images = ring_from_json(j["images"], "map.images");
    try {
        return DiscreteMap(std::move(mesh), std::move(images));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), "map");
    }
}

json domain_to_json(const PolygonalDomain& domain) {
    json j;
    j["outer"] = ring_to_json(domain.outer);
    json holes = json::array();
    for (const auto& hole : domain.holes) holes.push_back(ring_to_json(hole));
    j["holes"] = holes;
    return j;
}

PolygonalDomain domain_from_json(const json& j) {
    if (!j.is_object() || !j.contains("outer"))
        throw ParseError("domain file must hold {\"outer\": [...], \"holes\": [...]}", "domain.outer");
    std::vector<Vec2> outer = ring_from_json(j["outer"], "domain.outer");
    std::vector<std::vector<Vec2>> holes;
    if (j.contains("holes")) {
        if (!j["holes"].is_array()) throw ParseError("expected an array of rings", "domain.holes");
        for (std::size_t h = 0; h < j["holes"].size(); ++h)
            holes.push_back(ring_from_json(j["holes"][h], "domain.holes[" + std::to_string(h) + "]"));
    }
    try {
        return PolygonalDomain(std::move(outer), std::move(holes));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), "domain");
    }
}

json energy_report_to_json(const EnergyReport& report) {
    json j;
    j["p"] = report.p;
    j["total"] = report.total;
    j["per_triangle"] = report.per_triangle;
    return j;
}

json psolve_report_to_json(const PSolveReport& report) {
    json j;
    j["iterations"] = report.iterations;
    j["energy_trace"] = report.energy_trace;
    j["final_gradient_norm"] = report.final_gradient_norm;
    j["gradient_threshold"] = report.gradient_threshold;
    j["converged"] = report.converged;
    j["final_energy"] = report.final_energy;
    return j;
}

json cover_to_json(const CellCover& cover) {
    json cells = json::array();
    for (const Cell& c : cover.cells) {
        json jc;
        jc["center"] = point_to_json(c.center);
        jc["half_width"] = c.half_width;
        jc["kind"] = c.kind == Cell::Kind::internal ? "internal" : "boundary";
        if (c.kind == Cell::Kind::boundary) {
            jc["external_face"] = ring_to_json(c.external_face);
            jc["face_loop"] = c.face_loop;
            jc["extension_dir"] = point_to_json(c.extension_dir);
        }
        cells.push_back(jc);
    }
    json j;
    j["epsilon"] = cover.epsilon;
    j["side"] = cover.side;
    j["multiplicity"] = cover.multiplicity;
    j["cells"] = cells;
    return j;
}

json cover_verification_to_json(const CoverVerification& v) {
    json j;
    j["pass"] = v.pass;
    j["coverage_ok"] = v.coverage_ok;
    j["coverage_misses"] = v.coverage_misses;
    j["miss_points"] = ring_to_json(v.miss_points);
    j["multiplicity_ok"] = v.multiplicity_ok;
    j["max_multiplicity"] = v.max_multiplicity;
    j["multiplicity_histogram"] = v.multiplicity_histogram;
    j["diameter_ok"] = v.diameter_ok;
    j["max_diameter"] = v.max_diameter;
    return j;
}

json chain_report_to_json(const ChainReport& report) {
    json steps = json::array();
    for (const ChainStep& s : report.steps) {
        json js;
        js["cell_index"] = s.cell_index;
        js["skipped"] = s.skipped;
        js["energy_before"] = s.energy_before;
        js["energy_after"] = s.energy_after;
        js["repair_energy_delta"] = s.repair_energy_delta;
        js["sup_displacement"] = s.sup_displacement;
        js["precell_size"] = s.precell_size;
        js["boundary_repair_magnitude"] = s.boundary_repair_magnitude;
        js["rkc_negative"] = s.rkc_negative;
        js["rkc_zero"] = s.rkc_zero;
        steps.push_back(js);
    }
    json j;
    j["epsilon"] = report.epsilon;
    j["p"] = report.p;
    j["input_energy"] = report.input_energy;
    j["final_energy"] = report.final_energy;
    j["final_sup_distance_to_input"] = report.final_sup_distance_to_input;
    j["royden_distance_to_input"] = report.royden_distance_to_input;
    j["total_repair_magnitude"] = report.total_repair_magnitude;
    j["total_repair_energy_delta"] = report.total_repair_energy_delta;
    j["jacobian_census"] = {{"positive", report.jacobian_positive},
                            {"zero", report.jacobian_zero},
                            {"negative", report.jacobian_negative}};
    j["injective"] = report.injective;
    j["steps"] = steps;
    return j;
}

json monotonicity_report_to_json(const MonotonicityReport& report) {
    json j;
    j["delta"] = report.delta;
    j["pass"] = report.pass;
    j["samples"] = report.sampled_points.size();
    j["failing_points"] = ring_to_json(report.failing_points);
    int max_count = 0;
    for (int c : report.fiber_component_counts) max_count = std::max(max_count, c);
    j["max_fiber_components"] = max_count;
    return j;
}

json orientation_census_to_json(const OrientationCensus& census) {
    json j;
    j["positive"] = census.positive;
    j["zero"] = census.zero;
    j["negative"] = census.negative;
    j["tolerance"] = census.tolerance;
    j["zero_triangles"] = census.zero_triangles;
    j["negative_triangles"] = census.negative_triangles;
    return j;
}

json injectivity_report_to_json(const InjectivityReport& report) {
    json j;
    j["injective"] = report.injective;
    j["census"] = orientation_census_to_json(report.census);
    json witnesses = json::array();
    for (auto [a, b] : report.overlap_witnesses) witnesses.push_back(json::array({a, b}));
    j["overlap_witnesses"] = witnesses;
    return j;
}

json modulus_report_to_json(const ModulusReport& report) {
    json j;
    j["dirichlet_energy"] = report.dirichlet_energy;
    j["max_ratio"] = report.max_ratio;
    j["fitted_c"] = report.fitted_c;
    json pairs = json::array();
    for (const auto& m : report.pairs) {
        json jm;
        jm["a"] = m.a;
        jm["b"] = m.b;
        jm["lhs"] = m.lhs;
        jm["rhs"] = m.rhs;
        jm["ratio"] = m.ratio;
        jm["skipped"] = m.skipped;
        pairs.push_back(jm);
    }
    j["pairs"] = pairs;
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file", path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), path);
    }
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file", path);
    out << j.dump(2) << "\n";
}

}  // namespace monomap
