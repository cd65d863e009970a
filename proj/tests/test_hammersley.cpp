#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "beadlab/errors.hpp"
#include "beadlab/gibbs_sampler.hpp"
#include "beadlab/hammersley.hpp"
#include "test_util.hpp"

using namespace beadlab;

namespace {

// Longest chain strictly increasing in site and time, O(n^2).
int dp_lpp(const PoissonField& f, int64_t a, double s, int64_t b, double t) {
  std::vector<FieldPoint> pts;
  for (const FieldPoint& p : f.by_time())
    if (p.x > a && p.x <= b && p.t > s && p.t <= t) pts.push_back(p);
  std::vector<int> best(pts.size(), 1);
  int out = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = 0; j < i; ++j)
      if (pts[j].x < pts[i].x && pts[j].t < pts[i].t) best[i] = std::max(best[i], best[j] + 1);
    out = std::max(out, best[i]);
  }
  return out;
}

std::vector<int64_t> random_positions(Rng& rng, int n, int max_gap) {
  std::vector<int64_t> z;
  int64_t x = 0;
  for (int k = 0; k < n; ++k) z.push_back(x += 1 + uniform_below(rng, max_gap));
  return z;
}

}  // namespace

TEST_CASE("DHD state validation and ring semantics") {
  CHECK_THROWS_AS(DhdState({3, 3}), ConfigError);
  CHECK_THROWS_AS(DhdState({4, 1}), ConfigError);
  DhdState s({0, 5, 9});
  CHECK(s.ring(7) == 2);  // first particle right of 7 jumps to 7
  CHECK(s.positions() == std::vector<int64_t>{0, 5, 7});
  CHECK(s.ring(7) == -1);  // occupied site
  CHECK(s.ring(12) == -1);  // right of the last stored particle
  CHECK(s.ring(1) == 1);
  CHECK(s.positions() == std::vector<int64_t>{0, 1, 7});
  CHECK_THROWS_AS(s.ring(-3), WindowExceeded);
}

TEST_CASE("single particle: no ring to its left keeps it, one ring moves it") {
  {
    const PoissonField f(0, 10, 1.0, {{5, 0.3}, {8, 0.6}});
    const DhdTrajectory tr = dhd_simulate(DhdState({0, 3}), f);
    CHECK(tr.final_state().positions() == std::vector<int64_t>{0, 3});
  }
  {
    const PoissonField f(1, 10, 1.0, {{1, 0.5}});
    const DhdTrajectory tr = dhd_simulate(DhdState({0, 3}), f);
    CHECK(tr.final_state().positions() == std::vector<int64_t>{0, 1});
    CHECK(tr.times.size() == 2);
    CHECK(tr.at(0.4).positions() == std::vector<int64_t>{0, 3});
    CHECK(tr.at(0.6).positions() == std::vector<int64_t>{0, 1});
  }
}

TEST_CASE("Poisson field validation and ordering") {
  CHECK_THROWS_AS(PoissonField(0, 5, 1.0, {{6, 0.5}}), ConfigError);
  CHECK_THROWS_AS(PoissonField(0, 5, 1.0, {{1, 1.5}}), ConfigError);
  CHECK_THROWS_AS(PoissonField(0, 5, 1.0, {{1, 0.5}, {2, 0.5}}), ConfigError);
  Rng rng = make_rng(1);
  const PoissonField f = PoissonField::sample(1, 200, 3.0, 1.0, rng);
  CHECK(f.size() > 400);
  CHECK(f.size() < 800);
  for (size_t i = 1; i < f.size(); ++i) {
    CHECK(f.by_time()[i - 1].t < f.by_time()[i].t);
    const FieldPoint &a = f.by_site()[i - 1], &b = f.by_site()[i];
    CHECK((a.x < b.x || (a.x == b.x && a.t > b.t)));
  }
}

TEST_CASE("last passage: trivial cases and the DP oracle") {
  const PoissonField empty(0, 10, 1.0, {});
  CHECK(lpp_count(empty, 0, 0.0, 10, 1.0) == 0);
  const PoissonField stairs(0, 10, 1.0, {{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.4}, {5, 0.5}});
  CHECK(lpp_count(stairs, 0, 0.0, 10, 1.0) == 5);
  CHECK(lpp_count(stairs, 2, 0.0, 10, 1.0) == 3);
  CHECK(lpp_count(stairs, 0, 0.25, 10, 1.0) == 3);
  // Same site or same time never chain.
  const PoissonField col(0, 10, 1.0, {{3, 0.1}, {3, 0.2}, {3, 0.3}});
  CHECK(lpp_count(col, 0, 0.0, 10, 1.0) == 1);
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = static_cast<int>(uniform_below(rng, 31));
    std::vector<FieldPoint> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back({1 + uniform_below(rng, 12), uniform01(rng) * 2.0});
    const PoissonField f(1, 12, 2.0, pts);
    const int64_t a = uniform_below(rng, 6);
    const double s = uniform01(rng);
    CHECK(lpp_count(f, a, s, 12, 2.0) == dp_lpp(f, a, s, 12, 2.0));
    CHECK(lpp_count(f, 0, 0.0, 7, 1.5) == dp_lpp(f, 0, 0.0, 7, 1.5));
  }
}

TEST_CASE("Gamma profile is the least extent reaching k points") {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const PoissonField f = PoissonField::sample(1, 30, 2.0, 1.0, rng);
    const auto prof = gamma_profile(f, 3, 1.5, 6);
    CHECK(prof[0] == 0);
    for (int k = 1; k <= 6; ++k) {
      std::optional<int64_t> want;
      for (int64_t h = 0; 3 + h <= 30; ++h)
        if (dp_lpp(f, 3, 0.0, 3 + h, 1.5) >= k) {
          want = h;
          break;
        }
      CHECK(prof[k] == want);
      CHECK(gamma(f, 3, 1.5, k) == want);
    }
  }
}

TEST_CASE("variational formula: t=0 and agreement with simulation at all event times") {
  Rng rng = make_rng(4);
  const std::vector<int64_t> z0 = random_positions(rng, 20, 3);
  const PoissonField f0 = PoissonField::sample(z0.front() + 1, z0.back(), 0.0, 1.0, rng);
  CHECK(dhd_lpp_all(DhdState(z0), f0, 0.0) == z0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<int64_t> z = random_positions(rng, 40, 4);
    const DhdState s(z);
    const PoissonField f = PoissonField::sample(z.front() + 1, z.back(), 5.0, 1.0, rng);
    const DhdTrajectory tr = dhd_simulate(s, f);
    for (size_t e = 0; e < tr.times.size(); ++e) {
      const auto lpp = dhd_lpp_all(s, f, tr.times[e]);
      CHECK(lpp == tr.states[e].positions());
      for (size_t n = 1; n < lpp.size(); ++n) CHECK(lpp[n - 1] < lpp[n]);
    }
    for (int n : {0, 7, 39}) CHECK(dhd_lpp(s, f, n, 5.0) == tr.final_state()[n]);
  }
}

TEST_CASE("variational formula refuses a window that misses the particles") {
  const DhdState s({0, 4, 9});
  CHECK_THROWS_AS(dhd_lpp_all(s, PoissonField(1, 6, 1.0, {}), 1.0), WindowExceeded);
  CHECK_THROWS_AS(dhd_lpp_all(s, PoissonField(-2, 9, 1.0, {{-1, 0.5}}), 1.0), WindowExceeded);
}

TEST_CASE("monotonicity: raising one initial position never lowers an output") {
  Rng rng = make_rng(5);
  int pairs = 0;
  while (pairs < 200) {
    const std::vector<int64_t> z = random_positions(rng, 30, 3);
    const int j = 1 + static_cast<int>(uniform_below(rng, 28));
    if (z[j] + 1 >= z[j + 1]) continue;
    std::vector<int64_t> up = z;
    ++up[j];
    const PoissonField f = PoissonField::sample(z.front() + 1, z.back(), 4.0, 1.0, rng);
    const auto a = dhd_lpp_all(DhdState(z), f, 4.0);
    const auto b = dhd_lpp_all(DhdState(up), f, 4.0);
    for (size_t n = 0; n < a.size(); ++n) CHECK(b[n] >= a[n]);
    ++pairs;
  }
}

TEST_CASE("tail bound values") {
  CHECK(tail_bound(1, 1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(tail_bound(10, 10, 1) - 1e10 / std::pow(3628800.0, 2)) < 1e-12);
  CHECK(std::abs(tail_bound(10, 10, 1) - 7.594e-4) < 1e-6);
  CHECK(tail_bound(3, 0, 1) == 0.0);
  CHECK_THROWS_AS(tail_bound(0, 1, 1), ConfigError);
  for (int k = 1; k < 30; ++k) CHECK(tail_bound(k + 1, 2, 1) <= tail_bound(k, 2, 1));
}

TEST_CASE("empirical last-passage tails stay below the bound") {
  Rng rng = make_rng(6);
  const int n = 100000;
  int ge6 = 0, ge10 = 0;
  for (int i = 0; i < n; ++i) {
    const PoissonField f = PoissonField::sample(1, 10, 1.0, 1.0, rng);
    const int l = lpp_count(f, 0, 0.0, 10, 1.0);
    ge6 += l >= 6;
    ge10 += l >= 10;
  }
  CHECK(static_cast<double>(ge6) / n <= tail_bound(6, 10, 1));
  CHECK(static_cast<double>(ge10) / n <= tail_bound(10, 10, 1));
}

TEST_CASE("domination of a torus column by the DHD") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TorusBeadConfig c = testing::hex_sample(12, 40 + seed);
    Rng rng = make_rng(seed);
    const DominationResult r = dhd_domination_trial(c, 3, 1.0, 1.0, 4, rng);
    CHECK(r.events > 0);
    CHECK(r.checks > 0);
    CHECK(r.violations == 0);
  }
}
