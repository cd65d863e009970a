#include "beadlab/hammersley.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "beadlab/bead_dynamics.hpp"
#include "beadlab/errors.hpp"

namespace beadlab {

DhdState::DhdState(std::vector<int64_t> z) : z_(std::move(z)) {
  if (z_.empty()) throw ConfigError("DHD state needs at least one particle");
  for (size_t i = 1; i < z_.size(); ++i)
    if (z_[i] <= z_[i - 1]) throw ConfigError("DHD positions must be strictly increasing");
}

int DhdState::ring(int64_t x) {
  if (x < z_.front()) {
    std::ostringstream os;
    os << "ring at site " << x << " left of the frozen particle at " << z_.front();
    throw WindowExceeded(os.str());
  }
  auto it = std::lower_bound(z_.begin(), z_.end(), x);
  if (it == z_.end() || *it == x) return -1;
  *it = x;
  return static_cast<int>(it - z_.begin());
}

PoissonField::PoissonField(int64_t lo, int64_t hi, double T, std::vector<FieldPoint> points)
    : lo_(lo), hi_(hi), T_(T), by_time_(std::move(points)) {
  for (const FieldPoint& p : by_time_)
    if (p.x < lo_ || p.x > hi_ || !(p.t > 0.0) || p.t > T_)
      throw ConfigError("field point outside the window");
  index();
  for (size_t i = 1; i < by_time_.size(); ++i)
    if (by_time_[i].t == by_time_[i - 1].t) throw ConfigError("field has two equal ring times");
}

void PoissonField::index() {
  std::sort(by_time_.begin(), by_time_.end(),
            [](const FieldPoint& a, const FieldPoint& b) { return a.t < b.t; });
  by_site_ = by_time_;
  std::sort(by_site_.begin(), by_site_.end(), [](const FieldPoint& a, const FieldPoint& b) {
    return a.x != b.x ? a.x < b.x : a.t > b.t;
  });
}

PoissonField PoissonField::sample(int64_t lo, int64_t hi, double T, double rate, Rng& rng) {
  std::vector<FieldPoint> pts;
  std::unordered_set<double> seen;
  if (rate > 0.0 && T > 0.0) {
    std::poisson_distribution<int64_t> count(rate * T);
    std::uniform_real_distribution<double> when(0.0, T);
    for (int64_t x = lo; x <= hi; ++x) {
      const int64_t n = count(rng);
      for (int64_t i = 0; i < n; ++i) {
        double t = when(rng);
        while (t == 0.0 || !seen.insert(t).second) t = when(rng);  // resample on collision
        pts.push_back({x, t});
      }
    }
  }
  return PoissonField(lo, hi, T, std::move(pts));
}

const DhdState& DhdTrajectory::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return states[static_cast<size_t>(it - times.begin()) - 1];
}

DhdTrajectory dhd_simulate(const DhdState& initial, const PoissonField& field) {
  DhdTrajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(initial);
  DhdState s = initial;
  for (const FieldPoint& p : field.by_time()) {
    if (s.ring(p.x) < 0) continue;
    tr.times.push_back(p.t);
    tr.states.push_back(s);
  }
  return tr;
}

namespace {

// Strict longest increasing subsequence in time over points already sorted
// by site with decreasing times inside a site; calls done(x, length) after
// the last point of each site.
template <class F>
void lis_sweep(const std::vector<FieldPoint>& by_site, int64_t a, double s, int64_t b, double t,
               F&& done) {
  std::vector<double> tails;
  auto it = std::upper_bound(by_site.begin(), by_site.end(), a,
                             [](int64_t v, const FieldPoint& p) { return v < p.x; });
  while (it != by_site.end() && it->x <= b) {
    const int64_t x = it->x;
    for (; it != by_site.end() && it->x == x; ++it) {
      if (it->t <= s || it->t > t) continue;
      auto pos = std::lower_bound(tails.begin(), tails.end(), it->t);
      if (pos == tails.end())
        tails.push_back(it->t);
      else
        *pos = it->t;
    }
    if (!done(x, static_cast<int>(tails.size()))) return;
  }
}

}  // namespace

int lpp_count(const PoissonField& field, int64_t a, double s, int64_t b, double t) {
  int best = 0;
  lis_sweep(field.by_site(), a, s, b, t, [&](int64_t, int len) {
    best = len;
    return true;
  });
  return best;
}

std::vector<std::optional<int64_t>> gamma_profile(const PoissonField& field, int64_t a, double t,
                                                  int kmax) {
  std::vector<std::optional<int64_t>> out(static_cast<size_t>(std::max(kmax, 0)) + 1);
  out[0] = 0;
  int found = 0;
  if (kmax <= 0) return out;
  lis_sweep(field.by_site(), a, 0.0, field.hi(), t, [&](int64_t x, int len) {
    while (found < len && found < kmax) out[++found] = x - a;
    return found < kmax;
  });
  return out;
}

std::optional<int64_t> gamma(const PoissonField& field, int64_t a, double t, int k) {
  if (k < 0) throw ConfigError("Gamma needs k >= 0");
  return gamma_profile(field, a, t, k)[k];
}

namespace {

void check_window(const DhdState& z, const PoissonField& field) {
  if (field.size() > 0 && field.by_site().front().x < z[0])
    throw WindowExceeded("field has rings left of the frozen particle");
  if (field.hi() < z[z.size() - 1])
    throw WindowExceeded("field window ends before the last particle");
}

}  // namespace

std::vector<int64_t> dhd_lpp_all(const DhdState& initial, const PoissonField& field, double t) {
  check_window(initial, field);
  const int n = initial.size();
  std::vector<int64_t> z(initial.positions());
  for (int j = 0; j < n; ++j) {
    const auto prof = gamma_profile(field, initial[j], t, n - 1 - j);
    for (int k = 1; k <= n - 1 - j; ++k)
      if (prof[k]) z[j + k] = std::min(z[j + k], initial[j] + *prof[k]);
  }
  return z;
}

int64_t dhd_lpp(const DhdState& initial, const PoissonField& field, int n, double t) {
  if (n < 0 || n >= initial.size()) throw WindowExceeded("label outside the stored window");
  check_window(initial, field);
  int64_t best = initial[n];
  for (int j = 0; j < n; ++j) {
    const auto g = gamma(field, initial[j], t, n - j);
    if (g) best = std::min(best, initial[j] + *g);
  }
  return best;
}

double tail_bound(int k, double h, double t) {
  if (k < 1) throw ConfigError("tail bound needs k >= 1");
  if (t * h <= 0.0) return 0.0;
  return std::exp(k * std::log(t * h) - 2.0 * std::lgamma(k + 1.0));
}

DominationResult dhd_domination_trial(TorusBeadConfig c, int column, double q, double T,
                                      int buffer, Rng& rng) {
  if (q <= 0.0) throw ConfigError("domination needs q > 0");
  const Geometry& g = c.geometry();
  const int64_t M = g.positions();
  const int nb = c.beads_per_column();
  const int lo_label = -buffer * nb;
  const int count = (2 * buffer + 1) * nb;
  std::vector<int64_t> z0;
  for (int i = 0; i < count; ++i) z0.push_back(c.position(column, lo_label + i));
  DhdState dhd(z0);

  DominationResult res;
  const int64_t edges = static_cast<int64_t>(g.columns()) * M;
  std::exponential_distribution<double> wait(q * static_cast<double>(edges));
  double time = 0.0;
  while (true) {
    time += wait(rng);
    if (time > T) break;
    const int64_t pick = uniform_below(rng, edges);
    const int col = static_cast<int>(pick / M);
    const int64_t e = pick % M;
    ++res.events;
    if (col == column) {
      ++res.column_rings;
      const int64_t first = dhd[0] + 1, last = dhd[dhd.size() - 1];
      for (int64_t x = e + floor_div(first - e + M - 1, M) * M; x <= last; x += M) dhd.ring(x);
    }
    if (auto mv = clock_ring_move(c, col, e, Direction::kDown)) c.move_bead(mv->bead, mv->target);
    for (int i = buffer * nb; i < count; ++i) {
      ++res.checks;
      if (dhd[i] > c.position(column, lo_label + i)) ++res.violations;
    }
  }
  return res;
}

}  // namespace beadlab
