#include "beadlab/square_lattice.hpp"

#include <cmath>
#include <sstream>

#include "beadlab/errors.hpp"
#include "beadlab/hex_lattice.hpp"

namespace beadlab {

SquareSlope make_square_slope(double rho1, double rho2) {
  if (!std::isfinite(rho1) || !std::isfinite(rho2) || !(std::abs(rho1) + std::abs(rho2) < 0.5)) {
    std::ostringstream os;
    os << "square slope (" << rho1 << "," << rho2 << ") is extremal or invalid";
    throw ExtremalSlope(os.str());
  }
  return {rho1, rho2};
}

Sector square_sector(int L, const SquareSlope& s) {
  if (L % 2 != 0) throw UnrealizableSector("square torus side must be even");
  Sector sec;
  sec.beads_per_column = L / 2 + floor_guarded(s.rho1 * L);
  sec.cross_winding = 4 * static_cast<int64_t>(floor_guarded(s.rho2 * L));
  return sec;
}

SquareWindings square_windings(const TorusBeadConfig& c) {
  return {c.column_winding(0) / 4.0, c.cross_winding() / 4.0};
}

// Zigzag l holds the black diagonal x-y = 2l+1 (odd t) and the white
// diagonal x-y = 2l+2 (even t), with t = x+y.
Point2 square_zigzag_vertex(int l, int64_t t) {
  const int64_t d = floor_mod(t, 2) == 1 ? 2 * l + 1 : 2 * l + 2;
  return {(t + d) / 2, (t - d) / 2};
}

}  // namespace beadlab
