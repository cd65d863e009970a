#include "beadlab/hex_lattice.hpp"

#include <cmath>
#include <sstream>

#include "beadlab/errors.hpp"

namespace beadlab {

Slope make_slope(double rho1, double rho2) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || !(rho1 + rho2 < 1.0) || !std::isfinite(rho1 + rho2)) {
    std::ostringstream os;
    os << "slope (" << rho1 << "," << rho2 << ") is extremal or invalid";
    throw ExtremalSlope(os.str());
  }
  return {rho1, rho2, 1.0 - rho1 - rho2};
}

int floor_guarded(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

Sector hex_sector(int L, const Slope& s) {
  Sector sec;
  sec.beads_per_column = floor_guarded(s.rho3 * L);
  sec.cross_winding = floor_guarded(s.rho2 * L);
  return sec;
}

HexWindings hex_windings(const TorusBeadConfig& c) {
  return {c.cross_winding(), c.column_winding(0)};
}

Slope realized_slope(const TorusBeadConfig& c) {
  const Geometry& g = c.geometry();
  const double L = g.side();
  Slope s;
  if (g.kind() == LatticeKind::kHex) {
    s.rho3 = c.beads_per_column() / L;
    s.rho2 = static_cast<double>(c.cross_winding()) / L;
    s.rho1 = 1.0 - s.rho2 - s.rho3;
  } else {
    s.rho1 = static_cast<double>(c.column_winding(0)) / (4.0 * L);
    s.rho2 = static_cast<double>(c.cross_winding()) / (4.0 * L);
    s.rho3 = 0.0;
  }
  return s;
}

HexEdgeCells hex_bead_edge(int l, int64_t p) {
  return {HexEdge::kHorizontal, l, static_cast<int>(p), l - 1, static_cast<int>(p) + 1};
}

HexEdgeCells hex_zigzag_edge(int l, int64_t t) {
  const int j = static_cast<int>(floor_div(t, 2));
  if (floor_mod(t, 2) == 0) return {HexEdge::kNorthWest, l, j, l, j};
  return {HexEdge::kNorthEast, l, j, l, j + 1};
}

bool hex_edge_occupied(const TorusBeadConfig& c, HexEdge kind, int l, int64_t j) {
  const int L = c.geometry().columns();
  const int lc = static_cast<int>(floor_mod(l, L));
  switch (kind) {
    case HexEdge::kHorizontal: return c.bead_edge(lc, j);
    case HexEdge::kNorthWest: return c.zigzag_edge(lc, 2 * j);
    case HexEdge::kNorthEast: return c.zigzag_edge(lc, 2 * j - 1);
  }
  return false;
}

}  // namespace beadlab
