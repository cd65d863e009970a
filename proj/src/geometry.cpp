#include "beadlab/geometry.hpp"

#include "beadlab/errors.hpp"

namespace beadlab {

std::string to_string(LatticeKind kind) {
  return kind == LatticeKind::kHex ? "hex" : "square";
}

LatticeKind lattice_from_string(const std::string& s) {
  if (s == "hex") return LatticeKind::kHex;
  if (s == "square") return LatticeKind::kSquare;
  throw ConfigError("unknown lattice '" + s + "' (expected hex or square)");
}

Geometry::Geometry(LatticeKind kind, int side) : kind_(kind), side_(side) {
  if (side < 3) throw ConfigError("torus side must be at least 3");
  if (kind == LatticeKind::kSquare && side % 2 != 0)
    throw ConfigError("square torus side must be even");
}

int64_t Geometry::max_right_below(int64_t v) const {
  if (kind_ == LatticeKind::kHex) return floor_div(v - 2, 2);
  return 2 * floor_div(v - 2, 2) + 1;
}

int64_t Geometry::min_right_above(int64_t v) const {
  if (kind_ == LatticeKind::kHex) return floor_div(v - 1, 2) + 1;
  return 2 * (floor_div(v - 1, 2) + 1);
}

int64_t Geometry::max_left_below(int64_t v) const {
  if (kind_ == LatticeKind::kHex) return floor_div(v - 3, 2);
  return 2 * (floor_div(v + 1, 2) - 1);
}

int64_t Geometry::min_left_above(int64_t v) const {
  if (kind_ == LatticeKind::kHex) return floor_div(v - 2, 2) + 1;
  return 2 * (floor_div(v, 2) + 1) - 1;
}

int Geometry::cross_step(int64_t t, bool occupied) const {
  const bool odd = floor_mod(t, 2) == 1;
  if (kind_ == LatticeKind::kHex) {
    int d = occupied ? 1 : 0;
    return odd ? d : -d;
  }
  int d = occupied ? 3 : -1;
  return odd ? d : -d;
}

}  // namespace beadlab
