#pragma once

#include <string>
#include <vector>

#include "beadlab/bead_config.hpp"

namespace beadlab {

// Densities of NW, NE and horizontal lozenges.
struct Slope {
  double rho1 = 1.0 / 3;
  double rho2 = 1.0 / 3;
  double rho3 = 1.0 / 3;
};

// Throws ExtremalSlope unless 0 < rho1, 0 < rho2, rho1 + rho2 < 1.
Slope make_slope(double rho1, double rho2);

// floor(x) with a small guard so that e.g. 12 * (1/3) rounds to 4.
int floor_guarded(double x);

// Hex sector N^L_rho: floor(rho3 L) beads per column, cross winding floor(rho2 L).
Sector hex_sector(int L, const Slope& s);

// Windings in lattice units: w2 along +e2 and w3 along +e3 (up a column).
struct HexWindings {
  int64_t w2 = 0;
  int64_t w3 = 0;
};
HexWindings hex_windings(const TorusBeadConfig& c);

// Empirical slope of the sector realized on a finite torus.
Slope realized_slope(const TorusBeadConfig& c);

// Hex edge kinds in the lozenge picture.
enum class HexEdge { kHorizontal, kNorthWest, kNorthEast };

// Vertex cells of a hex edge: white vertex B(cell_w), black vertex A(cell_b),
// with cells (l, j) on the torus unfolded to Z^2.
struct HexEdgeCells {
  HexEdge kind;
  int wl, wj;  // white cell
  int bl, bj;  // black cell
};

// Bead edge at position p of column l.
HexEdgeCells hex_bead_edge(int l, int64_t p);
// Zigzag edge t of Z_l.
HexEdgeCells hex_zigzag_edge(int l, int64_t t);

// Occupation of a given hex edge in the configuration.
bool hex_edge_occupied(const TorusBeadConfig& c, HexEdge kind, int l, int64_t j);

}  // namespace beadlab
