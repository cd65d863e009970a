#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "beadlab/errors.hpp"
#include "beadlab/experiments.hpp"
#include "beadlab/stats.hpp"

using namespace beadlab;

namespace {

ExperimentSpec small(ExperimentKind k) {
  ExperimentSpec s;
  s.kind = k;
  s.L = 12;
  s.replicas = 40;
  s.times = {1.0, 2.0};
  s.seed = 5;
  s.jobs = 2;
  s.trend_sides = {6, 9};
  s.windows = {0, 3, 6};
  s.gap_radius = 2;
  return s;
}

}  // namespace

TEST_CASE("running statistics: merge equals sequential accumulation") {
  RunningStats a, b, all;
  for (int i = 0; i < 50; ++i) {
    const double x = std::sin(i * 1.3) * 4 + i * 0.01;
    (i < 20 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  const Estimate e = mean_estimate({1, 2, 3, 4});
  CHECK(e.value == doctest::Approx(2.5));
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
}

TEST_CASE("least squares fits recover exact lines") {
  const LinearFit f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.rss < 1e-20);
  const LinearFit w = weighted_linear_fit({0, 1, 2}, {0, -1, -2}, {0.1, 0.2, 0.3});
  CHECK(w.slope == doctest::Approx(-1.0));
  CHECK(w.slope_se > 0.0);
  CHECK(within_sigma(1.0, 0.1, 1.2, 0.1));
  CHECK_FALSE(within_sigma(1.0, 0.01, 1.2, 0.01));
}

TEST_CASE("power law fit recovers a known exponent") {
  std::vector<double> t{4, 16, 64, 256}, v;
  for (double x : t) v.push_back(0.7 * std::pow(x, 0.4));
  const PowerFit p = power_law_fit(t, v);
  CHECK(p.alpha == doctest::Approx(0.4).epsilon(1e-4));
  CHECK(p.c == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(p.rss < 1e-8);
  std::vector<double> lg;
  for (double x : t) lg.push_back(0.2 + 0.1 * std::log(x));
  const PowerFit q = power_law_fit(t, lg);
  CHECK(q.rss > 0.0);
  CHECK(q.alpha < 0.25);
}

TEST_CASE("parallel farm covers every index once and rethrows failures") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(50, 3, [](int i) {
                    if (i == 17) throw ConfigError("boom");
                  }),
                  ConfigError);
}

TEST_CASE("band test uses both standard errors and the margin") {
  ResultRow r;
  r.estimate = 1.0;
  r.reference = 1.35;
  r.se = 0.1;
  r.reference_se = 0.0;
  CHECK_FALSE(within_band(r));
  r.margin = 0.06;
  CHECK(within_band(r));
  r.margin = 0;
  r.reference_se = 0.1;
  CHECK(within_band(r));
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec s = small(ExperimentKind::kStationarity);
  CHECK_NOTHROW(check_spec(s));
  s.replicas = 1;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.replicas = 10;
  s.times = {2, 2};
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.times = {3, 1};
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  s.times = {1};
  s.slope = Slope{0.7, 0.5, -0.2};
  CHECK_THROWS_AS(check_spec(s), ExtremalSlope);
  s.slope = Slope{};
  s.p = 0;
  s.q = 0;
  CHECK_THROWS_AS(check_spec(s), ConfigError);
  CHECK(experiment_from_string("gap_tail") == ExperimentKind::kGapTail);
  CHECK_THROWS_AS(experiment_from_string("nope"), ConfigError);
}

TEST_CASE("reversible stationarity run passes its panels") {
  ExperimentSpec s = small(ExperimentKind::kStationarity);
  s.p = 1;
  s.q = 1;
  s.contrast = false;
  const ResultTable t = stationarity_experiment(s);
  CHECK(t.hard_pass());
  CHECK(t.find("panel failures at T=2") != nullptr);
  for (const ResultRow& r : t.rows) {
    CHECK(r.se >= 0.0);
    CHECK(r.seed == 5);
  }
}

TEST_CASE("symmetric drift: no net flux") {
  ExperimentSpec s = small(ExperimentKind::kDrift);
  s.p = 1;
  s.q = 1;
  const ResultTable t = drift_experiment(s);
  const ResultRow* r = t.find("E Q_x(T)/T");
  REQUIRE(r != nullptr);
  CHECK(r->reference == 0.0);
  CHECK(within_band(*r));
}

TEST_CASE("speed consistency identities hold exactly per configuration") {
  ExperimentSpec s = small(ExperimentKind::kSpeed);
  const ResultTable t = speed_consistency(s);
  const ResultRow* a = t.find("J static - rho3 m");
  const ResultRow* b = t.find("Q/T + rho3 v");
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  CHECK(a->pass);
  CHECK(b->pass);
  CHECK(std::abs(a->estimate - a->reference) < 1e-9);
}

TEST_CASE("gap statistics: zero window counts nothing") {
  ExperimentSpec s = small(ExperimentKind::kGapTail);
  const ResultTable t = gap_tail_experiment(s);
  const ResultRow* r0 = t.find("mean N_r r=0");
  REQUIRE(r0 != nullptr);
  CHECK(r0->estimate == 0.0);
  CHECK(r0->se == 0.0);
  const ResultRow* r6 = t.find("mean N_r r=6");
  REQUIRE(r6 != nullptr);
  CHECK(r6->reference == doctest::Approx(2.0));
}

TEST_CASE("result tables: CSV layout and deterministic content") {
  ExperimentSpec s = small(ExperimentKind::kGapTail);
  std::ostringstream a, b;
  gap_tail_experiment(s).write_csv(a);
  s.jobs = 1;
  gap_tail_experiment(s).write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("# beadlab 1.0", 0) == 0);
  CHECK(a.str().find("experiment,observable,parameters,estimate,se,reference") != std::string::npos);
}
