#pragma once

#include <string>

#include <json.hpp>

#include "monomap/cover.hpp"
#include "monomap/diagnostics.hpp"
#include "monomap/domain.hpp"
#include "monomap/functionals.hpp"
#include "monomap/homeomorphize.hpp"
#include "monomap/mesh.hpp"
#include "monomap/psolver.hpp"

namespace monomap {

using json = nlohmann::ordered_json;

// Mesh files carry {"vertices": [[x,y],...], "triangles": [[i,j,k],...]};
// boundary loops are derived on load. Parse failures name the bad field.
json mesh_to_json(const TriangleMesh& mesh);
MeshPtr mesh_from_json(const json& j);

// Map files carry {"images": [[x,y],...]} and pair with a mesh file.
json map_to_json(const DiscreteMap& map);
DiscreteMap map_from_json(const json& j, MeshPtr mesh);

// Domain files carry {"outer": [[x,y],...], "holes": [[[x,y],...],...]}.
json domain_to_json(const PolygonalDomain& domain);
PolygonalDomain domain_from_json(const json& j);

json energy_report_to_json(const EnergyReport& report);
json psolve_report_to_json(const PSolveReport& report);
json cover_to_json(const CellCover& cover);
json cover_verification_to_json(const CoverVerification& v);
json chain_report_to_json(const ChainReport& report);
json monotonicity_report_to_json(const MonotonicityReport& report);
json orientation_census_to_json(const OrientationCensus& census);
json injectivity_report_to_json(const InjectivityReport& report);
json modulus_report_to_json(const ModulusReport& report);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace monomap
