#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "beadlab/bead_config.hpp"
#include "beadlab/rng.hpp"

namespace beadlab {

struct DynamicsSpec {
  double p = 0.0;  // rate of each up-clock
  double q = 1.0;  // rate of each down-clock
  double T = 1.0;
  uint64_t seed = 1;
  LatticeKind lattice = LatticeKind::kHex;
};

void check_spec(const DynamicsSpec& spec);

struct Move {
  BeadId bead;
  int64_t from = 0;    // lifted
  int64_t target = 0;  // lifted
  Direction direction = Direction::kUp;
  double rate = 0.0;
};

// All (bead, target) jumps with rate p (up) or q (down), in canonical order:
// columns, then labels, then up targets before down targets, nearest first.
std::vector<Move> enumerate_moves(const TorusBeadConfig& c, double p = 1.0, double q = 1.0);

// The jump triggered by a ring of the clock at edge e of a column, under the
// clock semantics: first bead below (p-clock, kUp) or above (q-clock, kDown),
// if it can reach e. std::nullopt for null events.
std::optional<Move> clock_ring_move(const TorusBeadConfig& c, int column, int64_t e, Direction d);

int64_t total_up_room(const TorusBeadConfig& c);
int64_t total_down_room(const TorusBeadConfig& c);

// Running observables along a trajectory.
class ObservableTracker {
 public:
  ObservableTracker() = default;
  explicit ObservableTracker(const Geometry& g);

  // Q_x counters; returns the slot of the face.
  size_t track_face(Face x);
  void tag_bead(const TorusBeadConfig& c, BeadId b);
  // Running maximum gap between consecutive beads of a column, over beads
  // sitting on edges of the ball of radius R around center.
  void track_gaps(const TorusBeadConfig& c, Face center, int R);

  int64_t q(size_t slot) const { return q_[slot]; }
  size_t tracked_faces() const { return faces_.size(); }
  const std::vector<Face>& faces() const { return faces_; }
  bool has_tag() const { return tagged_; }
  BeadId tagged_bead() const { return tag_; }
  int64_t tagged_displacement(const TorusBeadConfig& c) const;
  int64_t max_gap() const { return max_gap_; }
  int64_t events() const { return events_; }
  int64_t flips() const { return flips_; }

  void on_flip(Face f, Direction d) {
    ++flips_;
    if (slot_.empty()) return;
    const int32_t s = slot_[static_cast<size_t>(f.column) * positions_ + f.index];
    if (s >= 0) q_[s] += d == Direction::kUp ? -1 : 1;
  }
  void on_event(const TorusBeadConfig& c, BeadId moved);

 private:
  int64_t gap_around(const TorusBeadConfig& c, int column, int64_t k) const;

  int positions_ = 0;
  std::vector<Face> faces_;
  std::vector<int32_t> slot_;
  std::vector<int64_t> q_;
  bool tagged_ = false;
  BeadId tag_;
  int64_t tag_start_ = 0;
  std::vector<uint8_t> ball_;  // per bead edge: in B_R
  bool gaps_ = false;
  int64_t max_gap_ = 0;
  int64_t events_ = 0;
  int64_t flips_ = 0;
};

// Faces within graph distance R of center (breadth-first on the face graph).
std::vector<Face> face_ball(const Geometry& g, Face center, int R);
std::vector<Face> face_neighbors(const Geometry& g, Face f);

struct EventRecord {
  double time = 0.0;
  BeadId bead;
  int64_t from = 0;
  int64_t to = 0;
};

// Fenwick-indexed rooms of all beads. With unit_steps, each bead has weight
// min(room, 1) (single-flip dynamics).
class MoveIndex {
 public:
  MoveIndex(const TorusBeadConfig& c, bool unit_steps = false);
  void refresh_after_move(const TorusBeadConfig& c, BeadId moved);
  void refresh_all(const TorusBeadConfig& c);
  int64_t total_up() const { return up_.total(); }
  int64_t total_down() const { return down_.total(); }
  int64_t up(int bead) const { return up_.value(bead); }
  int64_t down(int bead) const { return down_.value(bead); }
  // Bead holding the k-th unit of up (down) weight and the offset within it.
  std::pair<int, int64_t> locate_up(int64_t k) const { return up_.locate(k); }
  std::pair<int, int64_t> locate_down(int64_t k) const { return down_.locate(k); }

 private:
  class Fenwick {
   public:
    void init(const std::vector<int64_t>& v);
    void set(int i, int64_t v);
    int64_t value(int i) const { return vals_[i]; }
    int64_t total() const { return total_; }
    std::pair<int, int64_t> locate(int64_t k) const;

   private:
    std::vector<int64_t> tree_, vals_;
    int64_t total_ = 0;
    int top_ = 1;
  };
  void refresh(const TorusBeadConfig& c, int column, int64_t k);

  bool unit_ = false;
  int nb_ = 0;
  int L_ = 0;
  Fenwick up_, down_;
};

struct StepResult {
  double dt = std::numeric_limits<double>::infinity();
  std::optional<Move> move;
};

// One Gillespie event: dt ~ Exp(total rate), move chosen proportionally to
// its rate and executed flip by flip. dt = inf when no move has positive rate.
StepResult gillespie_step(TorusBeadConfig& c, MoveIndex& idx, const DynamicsSpec& spec, Rng& rng,
                          ObservableTracker* tracker);

// Advances to time spec.T with a fresh RNG seeded from spec.seed.
struct RunResult {
  double time = 0.0;
  int64_t events = 0;
};
RunResult run(TorusBeadConfig& c, const DynamicsSpec& spec, ObservableTracker* tracker,
              std::vector<EventRecord>* log = nullptr);
RunResult run(TorusBeadConfig& c, const DynamicsSpec& spec, Rng& rng, ObservableTracker* tracker,
              std::vector<EventRecord>* log = nullptr);

// Single elementary flips: rate p per possible up flip, q per down flip.
RunResult single_flip_run(TorusBeadConfig& c, const DynamicsSpec& spec, ObservableTracker* tracker);
RunResult single_flip_run(TorusBeadConfig& c, const DynamicsSpec& spec, Rng& rng,
                          ObservableTracker* tracker);

// (#{e : x in V(e,up)}, #{e : x in V(e,down)}) for face x.
std::pair<int64_t, int64_t> compute_V_counts(const TorusBeadConfig& c, Face x);

// X(l) = sum over beads of column l of (|I+| - |I-|).
std::vector<int64_t> column_charges(const TorusBeadConfig& c);
// 2 Y_l / p = -sum |I+|(|I+|+1) + sum |I-|(|I-|+1).
std::vector<int64_t> column_currents_twice(const TorusBeadConfig& c);
// Sum over all moves (unit rates) of X_l(after) - X_l(before), by applying
// every enumerated move to a copy.
std::vector<int64_t> symmetric_generator_on_charges(const TorusBeadConfig& c);

}  // namespace beadlab
