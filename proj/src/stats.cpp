#include "beadlab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace beadlab {

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::std_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

Estimate mean_estimate(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return {s.mean(), s.std_error(), s.count()};
}

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
    throw std::invalid_argument("linear fit needs at least two matching points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("degenerate abscissae in linear fit");
  LinearFit f;
  f.slope = (sw * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope_se = std::sqrt(sw / det);
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += r * r;
  }
  return f;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f = weighted_linear_fit(x, y, std::vector<double>(x.size(), 1.0));
  // Unweighted: the slope error comes from the residual scatter.
  const double n = static_cast<double>(x.size());
  double mx = 0, sxx = 0;
  for (double v : x) mx += v / n;
  for (double v : x) sxx += (v - mx) * (v - mx);
  f.slope_se = x.size() > 2 ? std::sqrt(f.rss / (n - 2) / sxx) : 0.0;
  return f;
}

bool within_sigma(double a, double se_a, double b, double se_b, double k) {
  return std::abs(a - b) <= k * std::sqrt(se_a * se_a + se_b * se_b);
}

}  // namespace beadlab
