#pragma once

#include <array>
#include <string>
#include <vector>

#include "beadlab/bead_config.hpp"

namespace beadlab {

struct Polygon {
  std::vector<std::array<double, 2>> corners;  // counter-clockwise
  int kind = 0;  // hex: 0 horizontal, 1 NW, 2 NE; square: 0 bead, 1 other
};

// One polygon per dimer of the fundamental domain: lozenges (hex) whose
// corners are the centers of the four faces touching the dimer, or
// dominoes (square) made of the two unit squares centered at its endpoints.
std::vector<Polygon> tiling_polygons(const TorusBeadConfig& c);

// SVG 1.1 document of the tiling.
std::string render_svg(const TorusBeadConfig& c);

}  // namespace beadlab
