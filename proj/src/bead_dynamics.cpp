#include "beadlab/bead_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "beadlab/errors.hpp"

namespace beadlab {

void check_spec(const DynamicsSpec& spec) {
  if (!(spec.p >= 0.0) || !(spec.q >= 0.0) || !(spec.p + spec.q > 0.0))
    throw ConfigError("dynamics needs p >= 0, q >= 0 and p + q > 0");
  if (!(spec.T >= 0.0)) throw ConfigError("dynamics horizon must be non-negative");
}

std::vector<Move> enumerate_moves(const TorusBeadConfig& c, double p, double q) {
  std::vector<Move> out;
  const int L = c.geometry().columns();
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) {
      const BeadId b{l, m};
      const int64_t x = c.position(b);
      for (int64_t i = 1, n = c.up_room(b); i <= n; ++i) out.push_back({b, x, x + i, Direction::kUp, p});
      for (int64_t i = 1, n = c.down_room(b); i <= n; ++i)
        out.push_back({b, x, x - i, Direction::kDown, q});
    }
  return out;
}

std::optional<Move> clock_ring_move(const TorusBeadConfig& c, int column, int64_t e, Direction d) {
  const int M = c.geometry().positions();
  if (c.bead_edge(column, e)) return std::nullopt;
  const int step = d == Direction::kUp ? -1 : 1;
  for (int k = 1; k < M; ++k) {
    const int idx = c.bead_at(column, e + step * k);
    if (idx < 0) continue;
    const BeadId b{column, idx};
    const int64_t room = d == Direction::kUp ? c.up_room(b) : c.down_room(b);
    if (k > room) return std::nullopt;
    const int64_t x = c.position(b);
    return Move{b, x, x - step * k, d, 1.0};
  }
  return std::nullopt;
}

int64_t total_up_room(const TorusBeadConfig& c) {
  int64_t s = 0;
  for (int l = 0; l < c.geometry().columns(); ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) s += c.up_room({l, m});
  return s;
}

int64_t total_down_room(const TorusBeadConfig& c) {
  int64_t s = 0;
  for (int l = 0; l < c.geometry().columns(); ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) s += c.down_room({l, m});
  return s;
}

// ---------------------------------------------------------------- faces

std::vector<Face> face_neighbors(const Geometry& g, Face f) {
  const int L = g.columns(), M = g.positions(), Z = g.zigzag_length();
  std::vector<Face> out;
  out.push_back({f.column, floor_mod(f.index - 1, M)});
  out.push_back({f.column, floor_mod(f.index + 1, M)});
  auto overlaps = [&](int64_t a0, int64_t a1, int64_t b0, int64_t b1) {
    for (int64_t t = a0; t < a1; ++t)
      for (int64_t u = b0; u < b1; ++u)
        if (floor_mod(t - u, Z) == 0) return true;
    return false;
  };
  const int64_t s = f.index;
  for (int64_t d = -2; d <= 2; ++d) {
    const int64_t u = s + d;
    if (overlaps(g.right_vertex(s), g.right_vertex(s + 1), g.left_vertex(u), g.left_vertex(u + 1)))
      out.push_back({static_cast<int>(floor_mod(f.column + 1, L)), floor_mod(u, M)});
    if (overlaps(g.right_vertex(u), g.right_vertex(u + 1), g.left_vertex(s), g.left_vertex(s + 1)))
      out.push_back({static_cast<int>(floor_mod(f.column - 1, L)), floor_mod(u, M)});
  }
  return out;
}

std::vector<Face> face_ball(const Geometry& g, Face center, int R) {
  const int M = g.positions();
  std::vector<int> dist(g.face_count(), -1);
  center.column = static_cast<int>(floor_mod(center.column, g.columns()));
  center.index = floor_mod(center.index, M);
  std::deque<Face> queue{center};
  dist[static_cast<size_t>(center.column) * M + center.index] = 0;
  std::vector<Face> out;
  while (!queue.empty()) {
    const Face f = queue.front();
    queue.pop_front();
    out.push_back(f);
    const int df = dist[static_cast<size_t>(f.column) * M + f.index];
    if (df == R) continue;
    for (const Face& n : face_neighbors(g, f)) {
      int& dn = dist[static_cast<size_t>(n.column) * M + n.index];
      if (dn < 0) {
        dn = df + 1;
        queue.push_back(n);
      }
    }
  }
  return out;
}

// -------------------------------------------------------------- tracker

ObservableTracker::ObservableTracker(const Geometry& g) : positions_(g.positions()) {
  slot_.assign(g.face_count(), -1);
}

size_t ObservableTracker::track_face(Face x) {
  const size_t key = static_cast<size_t>(x.column) * positions_ + floor_mod(x.index, positions_);
  if (slot_[key] >= 0) return static_cast<size_t>(slot_[key]);
  slot_[key] = static_cast<int32_t>(faces_.size());
  faces_.push_back({x.column, floor_mod(x.index, positions_)});
  q_.push_back(0);
  return faces_.size() - 1;
}

void ObservableTracker::tag_bead(const TorusBeadConfig& c, BeadId b) {
  tagged_ = true;
  tag_ = b;
  tag_start_ = c.position(b);
}

int64_t ObservableTracker::tagged_displacement(const TorusBeadConfig& c) const {
  return tagged_ ? c.position(tag_) - tag_start_ : 0;
}

int64_t ObservableTracker::gap_around(const TorusBeadConfig& c, int column, int64_t k) const {
  // Gaps (k-1, k) and (k, k+1), counted when either endpoint lies in the ball.
  const int M = positions_;
  auto in_ball = [&](int64_t kk) {
    return ball_[static_cast<size_t>(column) * M + floor_mod(c.position(column, kk), M)] != 0;
  };
  int64_t g = 0;
  const bool here = in_ball(k);
  if (here || in_ball(k - 1)) g = std::max(g, c.position(column, k) - c.position(column, k - 1));
  if (here || in_ball(k + 1)) g = std::max(g, c.position(column, k + 1) - c.position(column, k));
  return g;
}

void ObservableTracker::track_gaps(const TorusBeadConfig& c, Face center, int R) {
  const Geometry& g = c.geometry();
  gaps_ = true;
  ball_.assign(g.face_count(), 0);
  for (const Face& f : face_ball(g, center, R))
    ball_[static_cast<size_t>(f.column) * positions_ + f.index] = 1;
  max_gap_ = 0;
  for (int l = 0; l < g.columns(); ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) max_gap_ = std::max(max_gap_, gap_around(c, l, m));
}

void ObservableTracker::on_event(const TorusBeadConfig& c, BeadId moved) {
  ++events_;
  if (!gaps_) return;
  for (int64_t d = -1; d <= 1; ++d)
    max_gap_ = std::max(max_gap_, gap_around(c, moved.column, moved.index + d));
}

// ----------------------------------------------------------- move index

void MoveIndex::Fenwick::init(const std::vector<int64_t>& v) {
  const int n = static_cast<int>(v.size());
  vals_ = v;
  tree_.assign(n + 1, 0);
  total_ = 0;
  for (int i = 0; i < n; ++i) {
    total_ += v[i];
    for (int j = i + 1; j <= n; j += j & -j) tree_[j] += v[i];
  }
  top_ = 1;
  while (top_ * 2 <= n) top_ *= 2;
}

void MoveIndex::Fenwick::set(int i, int64_t v) {
  const int64_t d = v - vals_[i];
  if (d == 0) return;
  vals_[i] = v;
  total_ += d;
  const int n = static_cast<int>(vals_.size());
  for (int j = i + 1; j <= n; j += j & -j) tree_[j] += d;
}

std::pair<int, int64_t> MoveIndex::Fenwick::locate(int64_t k) const {
  const int n = static_cast<int>(vals_.size());
  int pos = 0;
  for (int step = top_; step > 0; step >>= 1) {
    const int nxt = pos + step;
    if (nxt <= n && tree_[nxt] <= k) {
      pos = nxt;
      k -= tree_[nxt];
    }
  }
  return {pos, k};
}

MoveIndex::MoveIndex(const TorusBeadConfig& c, bool unit_steps)
    : unit_(unit_steps), nb_(c.beads_per_column()), L_(c.geometry().columns()) {
  refresh_all(c);
}

void MoveIndex::refresh_all(const TorusBeadConfig& c) {
  std::vector<int64_t> u(static_cast<size_t>(L_) * nb_), d(u.size());
  for (int l = 0; l < L_; ++l)
    for (int m = 0; m < nb_; ++m) {
      int64_t a = c.up_room({l, m}), b = c.down_room({l, m});
      if (unit_) {
        a = std::min<int64_t>(a, 1);
        b = std::min<int64_t>(b, 1);
      }
      u[static_cast<size_t>(l) * nb_ + m] = a;
      d[static_cast<size_t>(l) * nb_ + m] = b;
    }
  up_.init(u);
  down_.init(d);
}

void MoveIndex::refresh(const TorusBeadConfig& c, int column, int64_t k) {
  const int l = static_cast<int>(floor_mod(column, L_));
  const int m = static_cast<int>(floor_mod(k, nb_));
  const BeadId b{l, m};
  int64_t a = c.up_room(b), d = c.down_room(b);
  if (unit_) {
    a = std::min<int64_t>(a, 1);
    d = std::min<int64_t>(d, 1);
  }
  up_.set(l * nb_ + m, a);
  down_.set(l * nb_ + m, d);
}

void MoveIndex::refresh_after_move(const TorusBeadConfig& c, BeadId moved) {
  const int l = moved.column, m = moved.index;
  const int left = (l + L_ - 1) % L_;
  const int cl = c.partner_offset(left), cr = c.partner_offset(l);
  refresh(c, l, m);
  refresh(c, left, m - cl);
  refresh(c, left, m - cl + 1);
  refresh(c, l + 1, m + cr - 1);
  refresh(c, l + 1, m + cr);
}

// ------------------------------------------------------------ gillespie

namespace {

// Picks a move proportionally to its rate and executes it.
Move execute_random_move(TorusBeadConfig& c, MoveIndex& idx, const DynamicsSpec& spec, Rng& rng,
                         ObservableTracker* tracker, double ru, double total) {
  const bool up = uniform01(rng) * total < ru;
  const auto [bead, offset] = up ? idx.locate_up(uniform_below(rng, idx.total_up()))
                                 : idx.locate_down(uniform_below(rng, idx.total_down()));
  const int nb = c.beads_per_column();
  const BeadId b{bead / nb, bead % nb};
  const int64_t from = c.position(b);
  const int64_t target = up ? from + 1 + offset : from - 1 - offset;
  if (tracker != nullptr) {
    c.move_bead(b, target, [tracker](Face f, Direction d) { tracker->on_flip(f, d); });
    tracker->on_event(c, b);
  } else {
    c.move_bead(b, target);
  }
  idx.refresh_after_move(c, b);
  return Move{b, from, target, up ? Direction::kUp : Direction::kDown, up ? spec.p : spec.q};
}

}  // namespace

StepResult gillespie_step(TorusBeadConfig& c, MoveIndex& idx, const DynamicsSpec& spec, Rng& rng,
                          ObservableTracker* tracker) {
  StepResult res;
  const double ru = spec.p * static_cast<double>(idx.total_up());
  const double total = ru + spec.q * static_cast<double>(idx.total_down());
  if (!(total > 0.0)) return res;
  res.dt = std::exponential_distribution<double>(total)(rng);
  res.move = execute_random_move(c, idx, spec, rng, tracker, ru, total);
  return res;
}

namespace {

RunResult run_impl(TorusBeadConfig& c, const DynamicsSpec& spec, Rng& rng,
                   ObservableTracker* tracker, std::vector<EventRecord>* log, bool unit) {
  check_spec(spec);
  MoveIndex idx(c, unit);
  RunResult r;
  double t = 0.0;
  while (true) {
    const double ru = spec.p * static_cast<double>(idx.total_up());
    const double total = ru + spec.q * static_cast<double>(idx.total_down());
    if (!(total > 0.0)) break;
    const double dt = std::exponential_distribution<double>(total)(rng);
    if (t + dt > spec.T) break;
    t += dt;
    const Move mv = execute_random_move(c, idx, spec, rng, tracker, ru, total);
    ++r.events;
    if (log != nullptr) log->push_back({t, mv.bead, mv.from, mv.target});
  }
  r.time = spec.T;
  return r;
}

}  // namespace

RunResult run(TorusBeadConfig& c, const DynamicsSpec& spec, Rng& rng, ObservableTracker* tracker,
              std::vector<EventRecord>* log) {
  return run_impl(c, spec, rng, tracker, log, false);
}

RunResult run(TorusBeadConfig& c, const DynamicsSpec& spec, ObservableTracker* tracker,
              std::vector<EventRecord>* log) {
  Rng rng = make_rng(spec.seed);
  return run(c, spec, rng, tracker, log);
}

RunResult single_flip_run(TorusBeadConfig& c, const DynamicsSpec& spec, Rng& rng,
                          ObservableTracker* tracker) {
  return run_impl(c, spec, rng, tracker, nullptr, true);
}

RunResult single_flip_run(TorusBeadConfig& c, const DynamicsSpec& spec, ObservableTracker* tracker) {
  Rng rng = make_rng(spec.seed);
  return single_flip_run(c, spec, rng, tracker);
}

// ------------------------------------------------------------ statics

std::pair<int64_t, int64_t> compute_V_counts(const TorusBeadConfig& c, Face x) {
  const int M = c.geometry().positions();
  const int l = x.column;
  const int64_t s = floor_mod(x.index, M);
  int64_t up = 0, down = 0;
  for (int64_t k = 0; k < M; ++k) {
    const int idx = c.bead_at(l, s - k);
    if (idx < 0) continue;
    up = std::max<int64_t>(0, (s - k) + c.up_room({l, idx}) - s);
    break;
  }
  for (int64_t k = 0; k < M; ++k) {
    const int idx = c.bead_at(l, s + 1 + k);
    if (idx < 0) continue;
    down = std::max<int64_t>(0, (s + 1) - ((s + 1 + k) - c.down_room({l, idx})));
    break;
  }
  return {up, down};
}

std::vector<int64_t> column_charges(const TorusBeadConfig& c) {
  std::vector<int64_t> x(c.geometry().columns(), 0);
  for (int l = 0; l < c.geometry().columns(); ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) x[l] += c.up_room({l, m}) - c.down_room({l, m});
  return x;
}

std::vector<int64_t> column_currents_twice(const TorusBeadConfig& c) {
  std::vector<int64_t> y(c.geometry().columns(), 0);
  for (int l = 0; l < c.geometry().columns(); ++l)
    for (int m = 0; m < c.beads_per_column(); ++m) {
      const int64_t a = c.up_room({l, m}), b = c.down_room({l, m});
      y[l] += -a * (a + 1) + b * (b + 1);
    }
  return y;
}

std::vector<int64_t> symmetric_generator_on_charges(const TorusBeadConfig& c) {
  const std::vector<int64_t> x0 = column_charges(c);
  std::vector<int64_t> gen(x0.size(), 0);
  for (const Move& mv : enumerate_moves(c)) {
    TorusBeadConfig copy = c;
    copy.move_bead(mv.bead, mv.target);
    const std::vector<int64_t> x1 = column_charges(copy);
    for (size_t l = 0; l < gen.size(); ++l) gen[l] += x1[l] - x0[l];
  }
  return gen;
}

}  // namespace beadlab
