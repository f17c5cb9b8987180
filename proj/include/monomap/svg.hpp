#pragma once

#include <optional>
#include <string>

#include "monomap/mesh.hpp"

namespace monomap {

struct SvgOptions {
    double panel_px = 480.0;                 // width of each panel
    std::optional<double> fold_circle = {};  // overlay circle of this radius on both panels
    std::string title;
};

// Source mesh and image mesh side by side, triangles colored by Jacobian
// sign: positive fills light, negative red, degenerate yellow.
std::string emit_svg(const DiscreteMap& map, const SvgOptions& options = {});

void save_svg(const std::string& path, const DiscreteMap& map, const SvgOptions& options = {});

}  // namespace monomap
