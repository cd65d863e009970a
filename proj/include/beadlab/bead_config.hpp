#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beadlab/geometry.hpp"

namespace beadlab {

// Persistent bead label: column and index in [0, beads_per_column).
struct BeadId {
  int column = 0;
  int index = 0;
  bool operator==(const BeadId& o) const { return column == o.column && index == o.index; }
};

// Raw dimer occupation: bead (transversal) edges per column and zigzag edges
// per zigzag, each stored as 0/1 flags.
struct DimerOccupation {
  Geometry geometry;
  std::vector<uint8_t> bead_edges;    // column * positions + p
  std::vector<uint8_t> zigzag_edges;  // column * zigzag_length + t

  explicit DimerOccupation(const Geometry& g = {})
      : geometry(g),
        bead_edges(static_cast<size_t>(g.columns()) * g.positions(), 0),
        zigzag_edges(static_cast<size_t>(g.columns()) * g.zigzag_length(), 0) {}
  bool operator==(const DimerOccupation& o) const {
    return geometry == o.geometry && bead_edges == o.bead_edges && zigzag_edges == o.zigzag_edges;
  }
  int dimer_count() const;
};

enum class Violation { kNone, kBeadCount, kInterlacing, kMatching, kWinding, kInternal };

std::string to_string(Violation v);

struct ValidationReport {
  Violation kind = Violation::kNone;
  std::string message;
  bool ok() const { return kind == Violation::kNone; }
};

// Winding sector: bead count per column and the scaled height change along
// the cross-column cycle (the +e2 loop).
struct Sector {
  int beads_per_column = 0;
  int64_t cross_winding = 0;
};

// Torus dimer configuration seen as interlaced bead columns.
//
// Bead positions are stored lifted to Z: position(l, k) for any integer k
// satisfies position(l, k + n) = position(l, k) + M. Bead (l, k) and bead
// (l+1, k + partner_offset(l)) alternate on Z_l:
//   right_vertex(P(l,k)) < left_vertex(P(l+1,k+c_l)) < right_vertex(P(l,k+1)).
// The offsets are fixed at construction; labels never cross.
class TorusBeadConfig {
 public:
  TorusBeadConfig() = default;

  // Positions are taken mod M; label 0 of every column is its smallest position.
  static TorusBeadConfig from_positions(const Geometry& g,
                                        const std::vector<std::vector<int64_t>>& columns);
  static TorusBeadConfig from_dimers(const DimerOccupation& d);

  const Geometry& geometry() const { return geom_; }
  int beads_per_column() const { return nb_; }
  int bead_count() const { return nb_ * geom_.columns(); }

  int64_t position(int column, int64_t k) const {
    const int64_t m = floor_mod(k, nb_);
    return pos_[static_cast<size_t>(column) * nb_ + m] + floor_div(k, nb_) * geom_.positions();
  }
  int64_t position(BeadId b) const { return pos_[static_cast<size_t>(b.column) * nb_ + b.index]; }
  int partner_offset(int column) const { return partner_[column]; }

  // Index of the bead at position p (mod M) of the column, or -1.
  int bead_at(int column, int64_t p) const {
    return occ_[static_cast<size_t>(column) * geom_.positions() + floor_mod(p, geom_.positions())];
  }
  bool bead_edge(int column, int64_t p) const { return bead_at(column, p) >= 0; }
  bool zigzag_edge(int zigzag, int64_t t) const {
    return zz_[static_cast<size_t>(floor_mod(zigzag, geom_.columns())) * geom_.zigzag_length() +
               floor_mod(t, geom_.zigzag_length())] != 0;
  }

  DimerOccupation dimers() const;
  std::vector<std::vector<int64_t>> column_positions() const;  // sorted, mod M

  // |I+_b| and |I-_b|.
  int64_t up_room(BeadId b) const;
  int64_t down_room(BeadId b) const;
  std::vector<int64_t> available_positions(BeadId b, Direction d) const;

  // Elementary moves at face (column, s): up moves the bead at s to s+1,
  // down moves the bead at s+1 to s.
  bool flippable(Face f, Direction d) const;
  void flip(Face f, Direction d);

  // Moves bead b to lifted position target by elementary flips.
  // on_cross(Face, Direction) is called for every crossed face.
  template <class F>
  void move_bead(BeadId b, int64_t target, F&& on_cross) {
    int64_t p = position(b);
    while (p < target) {
      Face f{b.column, floor_mod(p, geom_.positions())};
      flip(f, Direction::kUp);
      on_cross(f, Direction::kUp);
      ++p;
    }
    while (p > target) {
      Face f{b.column, floor_mod(p - 1, geom_.positions())};
      flip(f, Direction::kDown);
      on_cross(f, Direction::kDown);
      --p;
    }
  }
  void move_bead(BeadId b, int64_t target) {
    move_bead(b, target, [](Face, Direction) {});
  }

  // Scaled height windings: along a column (upward) and along the
  // cross-column cycle starting at face (0, 0) (or (0, 0) and (0, 1) on the
  // square lattice).
  int64_t column_winding(int column = 0) const;
  int64_t cross_winding() const;
  Sector sector() const { return {nb_, cross_winding()}; }

  // Deliberately break invariants; used to exercise validate().
  void unsafe_set_zigzag_edge(int zigzag, int64_t t, bool value);
  void unsafe_move_bead_edge(BeadId b, int64_t new_position);

  bool operator==(const TorusBeadConfig& o) const {
    return geom_ == o.geom_ && nb_ == o.nb_ && pos_ == o.pos_ && occ_ == o.occ_ && zz_ == o.zz_;
  }

 private:
  void rebuild_zigzags();
  uint8_t& zz(int zigzag, int64_t t) {
    return zz_[static_cast<size_t>(floor_mod(zigzag, geom_.columns())) * geom_.zigzag_length() +
               floor_mod(t, geom_.zigzag_length())];
  }

  Geometry geom_;
  int nb_ = 0;
  std::vector<int64_t> pos_;   // column * nb + index, lifted
  std::vector<int> partner_;   // per column
  std::vector<int32_t> occ_;   // column * M + p, bead index or -1
  std::vector<uint8_t> zz_;    // zigzag * 2L + t
};

// Checks bead counts, interlacing, perfect matching and (if given) the sector.
ValidationReport validate(const TorusBeadConfig& c, const Sector* expected = nullptr);
ValidationReport validate_dimers(const DimerOccupation& d);

// Scaled height difference h(last) - h(first) along a path of adjacent faces.
int64_t height_diff(const TorusBeadConfig& c, const std::vector<Face>& path);

// Cross-column cycle through a face: the +e2 loop.
std::vector<Face> cross_loop(const Geometry& g, Face start);
// Column cycle through a face (upward).
std::vector<Face> column_loop(const Geometry& g, Face start);

}  // namespace beadlab
