#pragma once

#include <cstddef>
#include <vector>

namespace beadlab {

// Streaming mean and variance (Welford). merge() is associative.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);
  size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for fewer than two values
  double std_error() const;

 private:
  size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  size_t n = 0;
};

Estimate mean_estimate(const std::vector<double>& xs);

// Ordinary least squares y = a + b x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double rss = 0.0;  // residual sum of squares
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Weighted least squares with weights 1 / sigma^2.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma);

// |a - b| <= k * sqrt(se_a^2 + se_b^2).
bool within_sigma(double a, double se_a, double b, double se_b, double k = 3.0);

}  // namespace beadlab
