#include "beadlab/bead_config.hpp"

#include <algorithm>
#include <sstream>

#include "beadlab/errors.hpp"

namespace beadlab {

int DimerOccupation::dimer_count() const {
  int n = 0;
  for (auto v : bead_edges) n += v;
  for (auto v : zigzag_edges) n += v;
  return n;
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "ok";
    case Violation::kBeadCount: return "bead-count";
    case Violation::kInterlacing: return "interlacing";
    case Violation::kMatching: return "matching";
    case Violation::kWinding: return "winding";
    case Violation::kInternal: return "internal";
  }
  return "unknown";
}

namespace {

// Checks that the removed vertices of every zigzag alternate between beads of
// the left column (right_vertex) and of the right column (left_vertex).
ValidationReport check_alternation(const Geometry& g,
                                   const std::vector<std::vector<int64_t>>& cols) {
  const int L = g.columns();
  const int Z = g.zigzag_length();
  std::vector<int> mark(Z);
  for (int l = 0; l < L; ++l) {
    std::fill(mark.begin(), mark.end(), 0);
    const int r = (l + 1) % L;
    for (int64_t p : cols[l]) {
      int& m = mark[floor_mod(g.right_vertex(p), Z)];
      if (m != 0) {
        std::ostringstream os;
        os << "column " << l << ": two beads share a vertex of zigzag " << l;
        return {Violation::kInterlacing, os.str()};
      }
      m = 1;
    }
    for (int64_t p : cols[r]) {
      int& m = mark[floor_mod(g.left_vertex(p), Z)];
      if (m != 0) {
        std::ostringstream os;
        os << "columns " << l << "," << r << ": beads collide on zigzag " << l;
        return {Violation::kInterlacing, os.str()};
      }
      m = 2;
    }
    int last = 0, first = 0;
    for (int t = 0; t < Z; ++t) {
      if (mark[t] == 0) continue;
      if (first == 0) first = mark[t];
      if (last == mark[t]) {
        std::ostringstream os;
        os << "columns " << l << "," << r << " are not interlaced near zigzag vertex " << t;
        return {Violation::kInterlacing, os.str()};
      }
      last = mark[t];
    }
    if (first == last && first != 0) {
      std::ostringstream os;
      os << "columns " << l << "," << r << " are not interlaced across the wrap";
      return {Violation::kInterlacing, os.str()};
    }
  }
  return {};
}

}  // namespace

TorusBeadConfig TorusBeadConfig::from_positions(const Geometry& g,
                                                const std::vector<std::vector<int64_t>>& columns) {
  const int L = g.columns();
  const int M = g.positions();
  if (static_cast<int>(columns.size()) != L)
    throw InterlacingViolation("expected one position list per column");
  std::vector<std::vector<int64_t>> cols(L);
  for (int l = 0; l < L; ++l) {
    for (int64_t p : columns[l]) cols[l].push_back(floor_mod(p, M));
    std::sort(cols[l].begin(), cols[l].end());
    if (cols[l].empty()) throw EmptyColumn("column " + std::to_string(l) + " has no bead");
    if (std::adjacent_find(cols[l].begin(), cols[l].end()) != cols[l].end())
      throw InterlacingViolation("column " + std::to_string(l) + " has a repeated position");
  }
  for (int l = 1; l < L; ++l)
    if (cols[l].size() != cols[0].size())
      throw InterlacingViolation("columns 0 and " + std::to_string(l) +
                                 " hold different bead counts");
  if (auto rep = check_alternation(g, cols); !rep.ok()) throw InterlacingViolation(rep.message);

  TorusBeadConfig c;
  c.geom_ = g;
  c.nb_ = static_cast<int>(cols[0].size());
  c.pos_.resize(static_cast<size_t>(L) * c.nb_);
  c.occ_.assign(static_cast<size_t>(L) * M, -1);
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < c.nb_; ++m) {
      c.pos_[static_cast<size_t>(l) * c.nb_ + m] = cols[l][m];
      c.occ_[static_cast<size_t>(l) * M + cols[l][m]] = m;
    }
  c.partner_.assign(L, 0);
  for (int l = 0; l < L; ++l) {
    const int r = (l + 1) % L;
    const int64_t v = g.right_vertex(c.position(l, 0));
    int64_t k = -c.nb_;
    while (g.left_vertex(c.position(r, k)) <= v) ++k;
    c.partner_[l] = static_cast<int>(k);
    for (int64_t m = 0; m < c.nb_; ++m) {
      const int64_t w = g.left_vertex(c.position(r, m + k));
      if (!(g.right_vertex(c.position(l, m)) < w && w < g.right_vertex(c.position(l, m + 1))))
        throw InterlacingViolation("columns " + std::to_string(l) + "," + std::to_string(r) +
                                   " fail lifted interlacing");
    }
  }
  c.zz_.assign(static_cast<size_t>(L) * g.zigzag_length(), 0);
  c.rebuild_zigzags();
  return c;
}

void TorusBeadConfig::rebuild_zigzags() {
  const int L = geom_.columns();
  const int Z = geom_.zigzag_length();
  std::fill(zz_.begin(), zz_.end(), 0);
  std::vector<int64_t> removed;
  for (int l = 0; l < L; ++l) {
    removed.clear();
    const int r = (l + 1) % L;
    for (int m = 0; m < nb_; ++m) {
      removed.push_back(floor_mod(geom_.right_vertex(position(l, m)), Z));
      removed.push_back(floor_mod(geom_.left_vertex(position(r, m)), Z));
    }
    std::sort(removed.begin(), removed.end());
    for (size_t i = 0; i < removed.size(); ++i) {
      const int64_t u = removed[i];
      const int64_t next = i + 1 < removed.size() ? removed[i + 1] : removed[0] + Z;
      for (int64_t t = u + 1; t + 1 < next; t += 2) zz(l, t) = 1;
    }
  }
}

TorusBeadConfig TorusBeadConfig::from_dimers(const DimerOccupation& d) {
  const Geometry& g = d.geometry;
  std::vector<std::vector<int64_t>> cols(g.columns());
  for (int l = 0; l < g.columns(); ++l)
    for (int p = 0; p < g.positions(); ++p)
      if (d.bead_edges[static_cast<size_t>(l) * g.positions() + p]) cols[l].push_back(p);
  TorusBeadConfig c = from_positions(g, cols);
  if (c.zz_ != d.zigzag_edges)
    throw MatchingViolation("zigzag dimers are not the matching determined by the beads");
  return c;
}

DimerOccupation TorusBeadConfig::dimers() const {
  DimerOccupation d(geom_);
  for (size_t i = 0; i < occ_.size(); ++i) d.bead_edges[i] = occ_[i] >= 0 ? 1 : 0;
  d.zigzag_edges = zz_;
  return d;
}

std::vector<std::vector<int64_t>> TorusBeadConfig::column_positions() const {
  std::vector<std::vector<int64_t>> cols(geom_.columns());
  for (int l = 0; l < geom_.columns(); ++l)
    for (int p = 0; p < geom_.positions(); ++p)
      if (bead_edge(l, p)) cols[l].push_back(p);
  return cols;
}

int64_t TorusBeadConfig::up_room(BeadId b) const {
  const int L = geom_.columns();
  const int r = (b.column + 1) % L;
  const int lc = (b.column + L - 1) % L;
  const int64_t a = geom_.left_vertex(position(r, b.index + partner_[b.column]));
  const int64_t c = geom_.right_vertex(position(lc, b.index - partner_[lc] + 1));
  return std::min(geom_.max_right_below(a), geom_.max_left_below(c)) - position(b);
}

int64_t TorusBeadConfig::down_room(BeadId b) const {
  const int L = geom_.columns();
  const int r = (b.column + 1) % L;
  const int lc = (b.column + L - 1) % L;
  const int64_t a = geom_.left_vertex(position(r, b.index + partner_[b.column] - 1));
  const int64_t c = geom_.right_vertex(position(lc, b.index - partner_[lc]));
  return position(b) - std::max(geom_.min_right_above(a), geom_.min_left_above(c));
}

std::vector<int64_t> TorusBeadConfig::available_positions(BeadId b, Direction d) const {
  std::vector<int64_t> out;
  const int64_t p = position(b);
  if (d == Direction::kUp) {
    for (int64_t i = 1, n = up_room(b); i <= n; ++i) out.push_back(p + i);
  } else {
    for (int64_t i = 1, n = down_room(b); i <= n; ++i) out.push_back(p - i);
  }
  return out;
}

bool TorusBeadConfig::flippable(Face f, Direction d) const {
  const int M = geom_.positions();
  const int64_t s = floor_mod(f.index, M);
  const int64_t from = d == Direction::kUp ? s : s + 1;
  const int64_t to = d == Direction::kUp ? s + 1 : s;
  if (bead_at(f.column, from) < 0 || bead_at(f.column, to) >= 0) return false;
  const int64_t fa = geom_.right_vertex(s), fb = geom_.right_vertex(s + 1);
  const int64_t ga = geom_.left_vertex(s), gb = geom_.left_vertex(s + 1);
  // Up: the dimer (u+1,u+2) must sit where the bead vertex lands.
  // Down: the dimer (u,u+1) must sit where the bead vertex lands.
  const int64_t zt = d == Direction::kUp ? 1 : 0;
  if (fb != fa && !zigzag_edge(f.column, fa + zt)) return false;
  if (gb != ga && !zigzag_edge(f.column - 1, ga + zt)) return false;
  return true;
}

void TorusBeadConfig::flip(Face f, Direction d) {
  if (!flippable(f, d)) {
    std::ostringstream os;
    os << "face (" << f.column << "," << f.index << ") is not flippable "
       << (d == Direction::kUp ? "up" : "down");
    throw NotFlippable(os.str());
  }
  const int M = geom_.positions();
  const int64_t s = floor_mod(f.index, M);
  const int64_t fa = geom_.right_vertex(s), fb = geom_.right_vertex(s + 1);
  const int64_t ga = geom_.left_vertex(s), gb = geom_.left_vertex(s + 1);
  const bool up = d == Direction::kUp;
  if (fb != fa) {
    zz(f.column, fa + (up ? 1 : 0)) = 0;
    zz(f.column, fa + (up ? 0 : 1)) = 1;
  }
  if (gb != ga) {
    zz(f.column - 1, ga + (up ? 1 : 0)) = 0;
    zz(f.column - 1, ga + (up ? 0 : 1)) = 1;
  }
  const size_t base = static_cast<size_t>(f.column) * M;
  const int64_t from = up ? s : floor_mod(s + 1, M);
  const int64_t to = up ? floor_mod(s + 1, M) : s;
  const int idx = occ_[base + from];
  occ_[base + from] = -1;
  occ_[base + to] = idx;
  pos_[static_cast<size_t>(f.column) * nb_ + idx] += up ? 1 : -1;
}

int64_t TorusBeadConfig::column_winding(int column) const {
  return height_diff(*this, column_loop(geom_, {column, 0}));
}

int64_t TorusBeadConfig::cross_winding() const {
  return height_diff(*this, cross_loop(geom_, {0, 0}));
}

void TorusBeadConfig::unsafe_set_zigzag_edge(int zigzag, int64_t t, bool value) {
  zz(zigzag, t) = value ? 1 : 0;
}

void TorusBeadConfig::unsafe_move_bead_edge(BeadId b, int64_t new_position) {
  const int M = geom_.positions();
  const size_t base = static_cast<size_t>(b.column) * M;
  int64_t& p = pos_[static_cast<size_t>(b.column) * nb_ + b.index];
  occ_[base + floor_mod(p, M)] = -1;
  p = new_position;
  occ_[base + floor_mod(p, M)] = b.index;
}

ValidationReport validate_dimers(const DimerOccupation& d) {
  const Geometry& g = d.geometry;
  const int L = g.columns(), M = g.positions(), Z = g.zigzag_length();
  std::vector<std::vector<int64_t>> cols(L);
  for (int l = 0; l < L; ++l)
    for (int p = 0; p < M; ++p)
      if (d.bead_edges[static_cast<size_t>(l) * M + p]) cols[l].push_back(p);
  for (int l = 0; l < L; ++l) {
    if (cols[l].empty()) return {Violation::kBeadCount, "column " + std::to_string(l) + " is empty"};
    if (cols[l].size() != cols[0].size())
      return {Violation::kBeadCount, "column " + std::to_string(l) + " holds " +
                                         std::to_string(cols[l].size()) + " beads, column 0 holds " +
                                         std::to_string(cols[0].size())};
  }
  if (auto rep = check_alternation(g, cols); !rep.ok()) return rep;
  // Every zigzag vertex covered exactly once.
  std::vector<int> cover(Z);
  for (int l = 0; l < L; ++l) {
    std::fill(cover.begin(), cover.end(), 0);
    const int r = (l + 1) % L;
    for (int64_t p : cols[l]) ++cover[floor_mod(g.right_vertex(p), Z)];
    for (int64_t p : cols[r]) ++cover[floor_mod(g.left_vertex(p), Z)];
    for (int t = 0; t < Z; ++t)
      if (d.zigzag_edges[static_cast<size_t>(l) * Z + t]) {
        ++cover[t];
        ++cover[(t + 1) % Z];
      }
    for (int t = 0; t < Z; ++t)
      if (cover[t] != 1) {
        std::ostringstream os;
        os << "vertex " << t << " of zigzag " << l << " is covered " << cover[t] << " times";
        return {Violation::kMatching, os.str()};
      }
  }
  return {};
}

ValidationReport validate(const TorusBeadConfig& c, const Sector* expected) {
  const Geometry& g = c.geometry();
  const int L = g.columns(), M = g.positions();
  const int nb = c.beads_per_column();
  if (nb < 1) return {Violation::kBeadCount, "configuration holds no beads"};
  if (auto rep = validate_dimers(c.dimers()); !rep.ok()) return rep;
  // Stored lifted positions and labels agree with the edge flags.
  for (int l = 0; l < L; ++l) {
    int count = 0;
    for (int p = 0; p < M; ++p) count += c.bead_edge(l, p) ? 1 : 0;
    if (count != nb) return {Violation::kBeadCount, "column " + std::to_string(l) + " count mismatch"};
    for (int m = 0; m < nb; ++m) {
      if (c.bead_at(l, c.position(BeadId{l, m})) != m)
        return {Violation::kInternal, "label table out of sync in column " + std::to_string(l)};
      if (c.position(l, m + 1) <= c.position(l, m))
        return {Violation::kInterlacing, "labels out of order in column " + std::to_string(l)};
    }
    const int r = (l + 1) % L;
    for (int64_t m = 0; m < nb; ++m) {
      const int64_t w = g.left_vertex(c.position(r, m + c.partner_offset(l)));
      if (!(g.right_vertex(c.position(l, m)) < w && w < g.right_vertex(c.position(l, m + 1))))
        return {Violation::kInterlacing,
                "lifted partners of columns " + std::to_string(l) + "," + std::to_string(r) +
                    " out of order"};
    }
  }
  if (expected != nullptr) {
    if (expected->beads_per_column != nb)
      return {Violation::kBeadCount, "bead count " + std::to_string(nb) + " differs from sector " +
                                       std::to_string(expected->beads_per_column)};
    const int64_t w = c.cross_winding();
    if (w != expected->cross_winding)
      return {Violation::kWinding, "cross winding " + std::to_string(w) + " differs from sector " +
                                       std::to_string(expected->cross_winding)};
  }
  return {};
}

namespace {

// Zigzag edge shared by face (l, a) and face (l+1, b), or -1.
int64_t shared_edge(const Geometry& g, int64_t a, int64_t b) {
  const int Z = g.zigzag_length();
  for (int64_t t = g.right_vertex(a); t < g.right_vertex(a + 1); ++t)
    for (int64_t u = g.left_vertex(b); u < g.left_vertex(b + 1); ++u)
      if (floor_mod(t - u, Z) == 0) return floor_mod(t, Z);
  return -1;
}

}  // namespace

int64_t height_diff(const TorusBeadConfig& c, const std::vector<Face>& path) {
  const Geometry& g = c.geometry();
  const int L = g.columns(), M = g.positions();
  if (path.empty()) throw InvalidPath("empty path");
  int64_t h = 0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const int la = static_cast<int>(floor_mod(path[i].column, L));
    const int lb = static_cast<int>(floor_mod(path[i + 1].column, L));
    const int64_t sa = floor_mod(path[i].index, M);
    const int64_t sb = floor_mod(path[i + 1].index, M);
    if (la == lb) {
      if (floor_mod(sb - sa, M) == 1) {
        h += g.column_step(c.bead_edge(la, sa + 1));
      } else if (floor_mod(sa - sb, M) == 1) {
        h -= g.column_step(c.bead_edge(la, sa));
      } else {
        throw InvalidPath("faces " + std::to_string(i) + "," + std::to_string(i + 1) +
                          " are not adjacent");
      }
    } else if (lb == (la + 1) % L) {
      const int64_t t = shared_edge(g, sa, sb);
      if (t < 0) throw InvalidPath("faces " + std::to_string(i) + "," + std::to_string(i + 1) +
                                   " are not adjacent");
      h += g.cross_step(t, c.zigzag_edge(la, t));
    } else if (la == (lb + 1) % L) {
      const int64_t t = shared_edge(g, sb, sa);
      if (t < 0) throw InvalidPath("faces " + std::to_string(i) + "," + std::to_string(i + 1) +
                                   " are not adjacent");
      h -= g.cross_step(t, c.zigzag_edge(lb, t));
    } else {
      throw InvalidPath("faces " + std::to_string(i) + "," + std::to_string(i + 1) +
                        " are not adjacent");
    }
  }
  return h;
}

std::vector<Face> cross_loop(const Geometry& g, Face start) {
  const int L = g.columns();
  std::vector<Face> path{start};
  if (g.kind() == LatticeKind::kHex) {
    for (int k = 1; k <= L; ++k) path.push_back({start.column + k, start.index - k});
  } else {
    if (floor_mod(start.index, 2) != 0)
      throw InvalidPath("square cross loop must start on an even face");
    for (int k = 0; k < L; ++k) {
      path.push_back({start.column + k, start.index + 1});
      path.push_back({start.column + k + 1, start.index});
    }
  }
  for (auto& f : path) f.column = static_cast<int>(floor_mod(f.column, L));
  return path;
}

std::vector<Face> column_loop(const Geometry& g, Face start) {
  std::vector<Face> path;
  for (int k = 0; k <= g.positions(); ++k) path.push_back({start.column, start.index + k});
  return path;
}

}  // namespace beadlab
