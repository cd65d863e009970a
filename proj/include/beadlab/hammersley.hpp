#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "beadlab/bead_config.hpp"
#include "beadlab/rng.hpp"

namespace beadlab {

// Discrete Hammersley dynamics on Z with finitely many labelled particles
// z(0) < ... < z(N-1).
//
// Window convention: particle 0 is a frozen boundary. Clock fields live on
// sites > z(0), so particle 0 can never be selected; a ring at a site < z(0)
// would need the unstored particle -1 and raises WindowExceeded. A ring
// right of z(N-1) selects the unstored particle N and leaves labels 0..N-1
// unchanged, so it is skipped.
class DhdState {
 public:
  DhdState() = default;
  explicit DhdState(std::vector<int64_t> z);  // throws ConfigError unless strictly increasing

  int size() const { return static_cast<int>(z_.size()); }
  int64_t operator[](int n) const { return z_[n]; }
  const std::vector<int64_t>& positions() const { return z_; }

  // Applies a ring at site x. Returns the label that moved, or -1.
  int ring(int64_t x);

  bool operator==(const DhdState& o) const { return z_ == o.z_; }

 private:
  std::vector<int64_t> z_;
};

struct FieldPoint {
  int64_t x = 0;
  double t = 0.0;
};

// Poisson clocks on sites lo..hi over [0, T]. Times are strictly increasing
// per site and pairwise distinct globally.
class PoissonField {
 public:
  PoissonField() = default;
  // Throws ConfigError on points outside the window or repeated times.
  PoissonField(int64_t lo, int64_t hi, double T, std::vector<FieldPoint> points);
  static PoissonField sample(int64_t lo, int64_t hi, double T, double rate, Rng& rng);

  int64_t lo() const { return lo_; }
  int64_t hi() const { return hi_; }
  double horizon() const { return T_; }
  // All points sorted by time.
  const std::vector<FieldPoint>& by_time() const { return by_time_; }
  // All points sorted by site, then by decreasing time within a site.
  const std::vector<FieldPoint>& by_site() const { return by_site_; }
  size_t size() const { return by_time_.size(); }

 private:
  void index();

  int64_t lo_ = 0, hi_ = -1;
  double T_ = 0.0;
  std::vector<FieldPoint> by_time_, by_site_;
};

struct DhdTrajectory {
  std::vector<double> times;      // times[0] = 0, then each effective jump
  std::vector<DhdState> states;   // state right after times[i]
  const DhdState& final_state() const { return states.back(); }
  // State at time t (the last recorded state with time <= t).
  const DhdState& at(double t) const;
};

// Processes the rings of the field in time order.
DhdTrajectory dhd_simulate(const DhdState& initial, const PoissonField& field);

// Maximal number of field points on a path that increases strictly in space
// and time inside (a, b] x (s, t].
int lpp_count(const PoissonField& field, int64_t a, double s, int64_t b, double t);

// Gamma((a,0), t, k) for k = 0..kmax: the least h >= 0 with
// L((a,0),(a+h,t)) >= k, or nullopt when no h inside the field window works.
std::vector<std::optional<int64_t>> gamma_profile(const PoissonField& field, int64_t a, double t,
                                                  int kmax);
std::optional<int64_t> gamma(const PoissonField& field, int64_t a, double t, int k);

// z_t(n) from the variational formula inf_{0<=j<=n} z0(j) + Gamma((z0(j),0), t, n-j).
// Throws WindowExceeded when the field window does not reach z0(N-1).
int64_t dhd_lpp(const DhdState& initial, const PoissonField& field, int n, double t);
// Same for all labels at once.
std::vector<int64_t> dhd_lpp_all(const DhdState& initial, const PoissonField& field, double t);

// (t h)^k / (k!)^2, evaluated in log space. Requires k >= 1.
double tail_bound(int k, double h, double t);

// Coupling of a column of the q-only edge-clock torus dynamics with a DHD
// driven by the same clocks. The DHD holds the lifted beads of the column
// with labels -buffer*n_b .. (buffer+1)*n_b - 1; each ring of the column's
// q-clock at edge e rings the DHD at every lift e + kM inside its window.
// Domination z_t(n) <= bead (l, n) is checked after every event for the
// labels 0 .. (buffer+1)*n_b - 1, i.e. away from the frozen boundary.
struct DominationResult {
  int64_t events = 0;       // torus clock rings
  int64_t column_rings = 0;
  int64_t checks = 0;
  int64_t violations = 0;
};
DominationResult dhd_domination_trial(TorusBeadConfig c, int column, double q, double T,
                                      int buffer, Rng& rng);

}  // namespace beadlab
