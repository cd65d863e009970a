#pragma once

#include <cstdint>
#include <string>

namespace beadlab {

enum class LatticeKind { kHex, kSquare };

std::string to_string(LatticeKind kind);
LatticeKind lattice_from_string(const std::string& s);

enum class Direction { kUp, kDown };

inline int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline int64_t floor_mod(int64_t a, int64_t b) { return a - floor_div(a, b) * b; }

// Column/zigzag geometry shared by the hexagonal and square tori.
//
// Both tori are cut into L columns of faces. The vertices between column l
// and column l+1 form a cycle Z_l of 2L vertices with alternating colors,
// indexed by t mod 2L; edge t of Z_l joins vertices t and t+1. A bead of
// column l at position p is a dimer across the column. It covers vertex
// right_vertex(p) of Z_l and vertex left_vertex(p) of Z_{l-1}.
//
// Hex: L positions per column, right_vertex(p) = 2p+1, left_vertex(p) = 2p+2.
// Square: 2L positions per column, right_vertex(p) = 2*floor(p/2)+1,
// left_vertex(p) = 2*ceil(p/2); heights are kept in units of 1/4.
//
// Face s of a column lies between bead positions s and s+1. It borders the
// edges t in [right_vertex(s), right_vertex(s+1)) of Z_l and the edges
// t in [left_vertex(s), left_vertex(s+1)) of Z_{l-1}.
class Geometry {
 public:
  Geometry() = default;
  Geometry(LatticeKind kind, int side);

  LatticeKind kind() const { return kind_; }
  int side() const { return side_; }
  int columns() const { return side_; }
  int positions() const { return kind_ == LatticeKind::kHex ? side_ : 2 * side_; }
  int zigzag_length() const { return 2 * side_; }
  int face_count() const { return columns() * positions(); }
  // Heights are reported as integers in units of 1/height_scale().
  int height_scale() const { return kind_ == LatticeKind::kHex ? 1 : 4; }

  int64_t right_vertex(int64_t p) const {
    return kind_ == LatticeKind::kHex ? 2 * p + 1 : 2 * floor_div(p, 2) + 1;
  }
  int64_t left_vertex(int64_t p) const {
    return kind_ == LatticeKind::kHex ? 2 * p + 2 : 2 * floor_div(p + 1, 2);
  }

  // Extremal positions with right_vertex / left_vertex strictly below or above v.
  int64_t max_right_below(int64_t v) const;
  int64_t min_right_above(int64_t v) const;
  int64_t max_left_below(int64_t v) const;
  int64_t min_left_above(int64_t v) const;

  // Height change (scaled) when moving up a column across a bead edge.
  int column_step(bool occupied) const {
    return kind_ == LatticeKind::kHex ? (occupied ? 0 : -1) : (occupied ? 3 : -1);
  }
  // Height change (scaled) when crossing zigzag edge t of Z_l from column l
  // into column l+1.
  int cross_step(int64_t t, bool occupied) const;

  bool operator==(const Geometry& o) const { return kind_ == o.kind_ && side_ == o.side_; }

 private:
  LatticeKind kind_ = LatticeKind::kHex;
  int side_ = 0;
};

struct Face {
  int column = 0;
  int64_t index = 0;
  bool operator==(const Face& o) const { return column == o.column && index == o.index; }
};

}  // namespace beadlab
