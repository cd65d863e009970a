#include "beadlab/determinantal.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <iostream>
#include <sstream>

#include "beadlab/errors.hpp"

namespace beadlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;
}  // namespace

KasteleynWeights weights_from_slope(const Slope& s) {
  const Slope chk = make_slope(s.rho1, s.rho2);
  const double a = std::sin(kPi * chk.rho1), b = std::sin(kPi * chk.rho2),
               c = std::sin(kPi * chk.rho3);
  const double sum = a + b + c;
  return {a / sum, b / sum, c / sum};
}

KernelEvaluator::KernelEvaluator(const KasteleynWeights& w, QuadratureOptions opt)
    : w_(w), opt_(opt) {
  const double c = (w.k3 * w.k3 - w.k1 * w.k1 - w.k2 * w.k2) / (2 * w.k1 * w.k2);
  if (c > -1.0 && c < 1.0) {
    split_ = true;
    phi0_ = std::acos(c);
  }
}

std::complex<double> KernelEvaluator::integrate(int nl, int nj, int panels) const {
  const double k1 = w_.k1, k2 = w_.k2, k3 = w_.k3;
  auto inner = [&](double phi) -> cd {
    const cd e = std::polar(1.0, -phi);
    const cd a = k1 + k2 * e;
    const cd c = k3 * e;
    cd h = 0.0;
    if (std::abs(a) > k3) {
      if (nl <= 0) h = (1.0 / a) * std::pow(-c / a, -nl);
    } else {
      if (nl >= 1) h = (1.0 / c) * std::pow(-a / c, nl - 1);
    }
    return h * std::polar(1.0, phi * nj);
  };
  std::vector<std::pair<double, double>> arcs;
  if (split_) {
    arcs = {{-kPi, -phi0_}, {-phi0_, phi0_}, {phi0_, kPi}};
  } else {
    arcs = {{-kPi, kPi}};
  }
  cd total = 0.0;
  for (auto [a, b] : arcs) {
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
      const double lo = a + i * h;
      total += boost::math::quadrature::gauss<double, 20>::integrate(inner, lo, lo + h);
    }
  }
  return total / (2 * kPi);
}

double KernelEvaluator::g(int nl, int nj) {
  const auto key = std::make_pair(nl, nj);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  int n = 1;
  cd s0 = integrate(nl, nj, n), s1 = integrate(nl, nj, 2 * n), s2 = integrate(nl, nj, 4 * n);
  while (!(std::abs(s1 - s0) < opt_.tol && std::abs(s2 - s1) < opt_.tol)) {
    n *= 2;
    if (4 * n > opt_.max_panels) {
      std::ostringstream os;
      os << "kernel quadrature at offset (" << nl << "," << nj << ") did not converge with "
         << opt_.max_panels << " panels";
      throw NoConvergence(os.str());
    }
    s0 = s1;
    s1 = s2;
    s2 = integrate(nl, nj, 4 * n);
  }
  last_panels_ = 4 * n;
  if (std::abs(s2.imag()) > opt_.tol)
    std::cerr << "warning: kernel value at (" << nl << "," << nj << ") has imaginary part "
              << s2.imag() << " above tolerance; discarded\n";
  cache_[key] = s2.real();
  return s2.real();
}

double kinv(KernelEvaluator& ev, std::array<int, 2> dx) {
  // b_0 = A(-1, 1); e1 shifts cells by (-1, 0), e2 by (1, -1).
  const int bl = -1 - dx[0] + dx[1];
  const int bj = 1 - dx[1];
  return ev.g(0 - bl, 0 - bj);
}

double kinv(const KasteleynWeights& w, std::array<int, 2> dx, QuadratureOptions opt) {
  KernelEvaluator ev(w, opt);
  return kinv(ev, dx);
}

KernelGrid::KernelGrid(const KasteleynWeights& w, int n) : w_(w), n_(n) {
  inv_p_.resize(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double th = 2 * kPi * (a + 0.5) / n, ph = 2 * kPi * (b + 0.5) / n;
      const cd p = w.k1 + w.k2 * std::polar(1.0, -ph) + w.k3 * std::polar(1.0, th - ph);
      inv_p_[static_cast<size_t>(a) * n + b] = 1.0 / p;
    }
}

std::complex<double> KernelGrid::g(int nl, int nj) const {
  cd s = 0.0;
  for (int a = 0; a < n_; ++a) {
    const double th = 2 * kPi * (a + 0.5) / n_;
    for (int b = 0; b < n_; ++b) {
      const double ph = 2 * kPi * (b + 0.5) / n_;
      s += std::polar(1.0, th * nl + ph * nj) * inv_p_[static_cast<size_t>(a) * n_ + b];
    }
  }
  return s / (static_cast<double>(n_) * n_);
}

double correlation(KernelEvaluator& ev, const std::vector<HexEdgeCells>& edges) {
  const int k = static_cast<int>(edges.size());
  if (k == 0) return 1.0;
  Eigen::MatrixXd m(k, k);
  double weight = 1.0;
  for (int i = 0; i < k; ++i) {
    weight *= ev.weights().of(edges[i].kind);
    for (int j = 0; j < k; ++j)
      m(i, j) = ev.g(edges[i].wl - edges[j].bl, edges[i].wj - edges[j].bj);
  }
  const double v = weight * m.determinant();
  const double slack = 1e-4;
  if (v < -slack || v > 1.0 + slack) {
    std::ostringstream os;
    os << "correlation value " << v << " outside [0,1]";
    throw NoConvergence(os.str());
  }
  return v;
}

namespace {

// Tanh-sinh rule on (a, b) at step h (half-width of the u grid 3.5).
// Nodes are generated from the distance to the nearer endpoint so that
// endpoint singularities are never sampled exactly.
template <class F>
double tanh_sinh_level(F&& f, double a, double b, double h) {
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (double u = -3.5; u <= 3.5 + 1e-12; u += h) {
    const double z = 0.5 * kPi * std::sinh(u);
    const double ends = 1.0 / (1.0 + std::exp(2.0 * std::abs(z)));  // (1 - |x|) / 2
    const double w = 0.5 * kPi * std::cosh(u) / (std::cosh(z) * std::cosh(z));
    const double x = u < 0 ? a + (b - a) * ends : b - (b - a) * ends;
    if (x <= a || x >= b) continue;
    s += w * f(x);
  }
  return s * h * half;
}

}  // namespace

double c_rho(const KasteleynWeights& w, double tol) {
  const double k1 = w.k1, k2 = w.k2, k3 = w.k3;
  // Inner integral over phi in closed form (Gauss's AGM formula): with
  // r = |k3 + k1 e^{i theta}|,
  //   \int_0^{2pi} dphi / |r + k2 e^{i phi}| = 2 pi / AGM(r + k2, |r - k2|).
  // It diverges logarithmically where r = k2; the outer integral is split
  // there (and at theta = pi, where r has a kink if k1 = k3).
  const double cos0 = (k2 * k2 - k1 * k1 - k3 * k3) / (2 * k1 * k3);
  auto inner = [&](double th) {
    const double r = std::abs(cd(k3 + k1 * std::cos(th), k1 * std::sin(th)));
    // r^2 - k2^2 = 2 k1 k3 (cos theta - cos theta0), evaluated without cancellation.
    const double diff = std::abs(2 * k1 * k3 * (std::cos(th) - cos0)) / (r + k2);
    double a = r + k2, b = diff;
    if (b == 0.0) return 0.0;
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
      const double m = 0.5 * (a + b);
      b = std::sqrt(a * b);
      a = m;
    }
    return 2 * kPi / a;
  };
  std::vector<double> cuts{0.0, kPi, 2 * kPi};
  if (cos0 > -1.0 && cos0 < 1.0) {
    const double t0 = std::acos(cos0);
    cuts = {0.0, t0, kPi, 2 * kPi - t0, 2 * kPi};
  }
  auto level = [&](double h) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) total += tanh_sinh_level(inner, cuts[i], cuts[i + 1], h);
    return total / (4 * kPi * kPi);
  };
  double h = 0.5;
  double s0 = level(h), s1 = level(h / 2), s2 = level(h / 4);
  while (!(std::abs(s1 - s0) < tol && std::abs(s2 - s1) < tol)) {
    h /= 2;
    if (h < 1.0 / 1024) throw NoConvergence("C(rho) quadrature did not converge");
    s0 = s1;
    s1 = s2;
    s2 = level(h / 4);
  }
  return s2;
}

double c_rho(const Slope& s, double tol) { return c_rho(weights_from_slope(s), tol); }

double c_rho_grid(const KasteleynWeights& w, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double th = 2 * kPi * (a + 0.5) / n, ph = 2 * kPi * (b + 0.5) / n;
      s += 1.0 / std::abs(w.k3 + w.k1 * std::polar(1.0, th) + w.k2 * std::polar(1.0, ph));
    }
  return s / (static_cast<double>(n) * n);
}

bool ciro_condition(const Slope& s) {
  const KasteleynWeights w = weights_from_slope(s);
  return std::sqrt(w.k1 * w.k2) * c_rho(w) < 1.0;
}

double j_explicit(const Slope& s) {
  const Slope chk = make_slope(s.rho1, s.rho2);
  return std::sin(kPi * chk.rho1) * std::sin(kPi * chk.rho2) /
         (kPi * std::sin(kPi * (chk.rho1 + chk.rho2)));
}

}  // namespace beadlab
