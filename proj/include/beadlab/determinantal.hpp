#pragma once

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "beadlab/hex_lattice.hpp"

namespace beadlab {

struct KasteleynWeights {
  double k1 = 1.0 / 3;
  double k2 = 1.0 / 3;
  double k3 = 1.0 / 3;
  double of(HexEdge e) const {
    return e == HexEdge::kNorthWest ? k1 : e == HexEdge::kNorthEast ? k2 : k3;
  }
};

// Sides of the perimeter-1 triangle with angles pi*rho_i.
KasteleynWeights weights_from_slope(const Slope& s);

struct QuadratureOptions {
  double tol = 1e-6;
  int max_panels = 4096;  // per smooth arc
};

// Inverse Kasteleyn kernel G(n) = K^{-1}(w, b) for the cell offset
// n = cell(w) - cell(b), with
//   G(n) = (2 pi)^{-2} \int\int e^{i(theta n_l + phi n_j)} /
//          (k1 + k2 e^{-i phi} + k3 e^{i(theta - phi)}).
// The theta integral is done by residues; the phi integral by composite
// Gauss-Legendre on the arcs between the two zeros, refined until three
// successive panel doublings agree within tol.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const KasteleynWeights& w, QuadratureOptions opt = {});
  double g(int nl, int nj);
  // Number of panels used by the last fresh evaluation.
  int last_panels() const { return last_panels_; }
  const KasteleynWeights& weights() const { return w_; }

 private:
  std::complex<double> integrate(int nl, int nj, int panels) const;

  KasteleynWeights w_;
  QuadratureOptions opt_;
  double phi0_ = 0.0;  // |k1 + k2 e^{-i phi}| = k3 at phi = +-phi0
  bool split_ = false;
  std::map<std::pair<int, int>, double> cache_;
  int last_panels_ = 0;
};

// K^{-1}(w_0, b_x): w_0 the white vertex of the horizontal edge at the
// origin, b_0 its black partner, b_x = b_0 shifted by x1 e1 + x2 e2.
double kinv(const KasteleynWeights& w, std::array<int, 2> dx, QuadratureOptions opt = {});
double kinv(KernelEvaluator& ev, std::array<int, 2> dx);

// Reference route: midpoint rule on an N x N grid of the unit torus, with
// the nodes offset by half a cell.
class KernelGrid {
 public:
  KernelGrid(const KasteleynWeights& w, int n);
  int resolution() const { return n_; }
  std::complex<double> g(int nl, int nj) const;
  KernelGrid refined() const { return KernelGrid(w_, 2 * n_); }

 private:
  KasteleynWeights w_;
  int n_;
  std::vector<std::complex<double>> inv_p_;  // 1/P on the grid
};

// k-point correlation (prod K(b_i, w_i)) det[K^{-1}(w_i, b_j)].
double correlation(KernelEvaluator& ev, const std::vector<HexEdgeCells>& edges);

// (2 pi)^{-2} \int\int d theta d phi / |k3 + k1 e^{i theta} + k2 e^{i phi}|.
double c_rho(const Slope& s, double tol = 1e-10);
double c_rho(const KasteleynWeights& w, double tol = 1e-10);
// Midpoint-rule value of the same integral on an N x N grid.
double c_rho_grid(const KasteleynWeights& w, int n);
// sqrt(k1 k2) C(rho) < 1.
bool ciro_condition(const Slope& s);

// (1/pi) sin(pi rho1) sin(pi rho2) / sin(pi (rho1 + rho2)).
double j_explicit(const Slope& s);

}  // namespace beadlab
