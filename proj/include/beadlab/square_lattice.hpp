#pragma once

#include "beadlab/bead_config.hpp"

namespace beadlab {

// Height slope of a domino tiling: mean height change per step along e1
// (up a column) and e2 (across columns). Non-extremal iff |rho1|+|rho2| < 1/2.
struct SquareSlope {
  double rho1 = 0.125;
  double rho2 = 0.125;
};

SquareSlope make_square_slope(double rho1, double rho2);

// Sector on the 2L-face-per-column torus: L/2 + floor(L rho1) beads per column
// (so the e1 winding equals floor(L rho1)) and e2 winding floor(L rho2).
// Scaled windings are 4x the lattice values.
Sector square_sector(int L, const SquareSlope& s);

// Windings in lattice units (may be multiples of 1/4 in general; integers here).
struct SquareWindings {
  double w1 = 0;
  double w2 = 0;
};
SquareWindings square_windings(const TorusBeadConfig& c);

// Planar coordinates of vertex t of zigzag l (Z^2 before periodization).
struct Point2 {
  int64_t x = 0;
  int64_t y = 0;
};
Point2 square_zigzag_vertex(int l, int64_t t);

}  // namespace beadlab
