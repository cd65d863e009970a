#include "beadlab/gibbs_sampler.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "beadlab/errors.hpp"

namespace beadlab {

int64_t default_burn_in(LatticeKind lattice, int L, BurnIn method) {
  (void)lattice;
  const int64_t l2 = static_cast<int64_t>(L) * L;
  if (method == BurnIn::kFlip) return 10 * l2;
  return std::max<int64_t>(100, l2 / 4);
}

namespace {

std::vector<std::vector<int64_t>> sheared_columns(const Geometry& g, int nb, int64_t shear,
                                                  int64_t phase) {
  const int L = g.columns();
  const int64_t M = g.positions();
  std::vector<std::vector<int64_t>> cols(L);
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < nb; ++m) cols[l].push_back(floor_div(m * M + l * shear + phase, nb));
  return cols;
}

}  // namespace

TorusBeadConfig staircase_for_sector(const Geometry& g, const Sector& sector) {
  const int L = g.columns();
  const int nb = sector.beads_per_column;
  std::ostringstream why;
  why << "sector with " << nb << " beads per column and cross winding "
      << static_cast<double>(sector.cross_winding) / g.height_scale() << " on L=" << L;
  if (nb < 1) throw UnrealizableSector(why.str() + ": empty columns");
  if (nb > g.positions()) throw UnrealizableSector(why.str() + ": more beads than positions");
  if (g.kind() == LatticeKind::kHex) {
    const int64_t w2 = sector.cross_winding;
    const int64_t w1 = L - nb - w2;
    if (w2 < 0 || w1 < 0) throw UnrealizableSector(why.str() + ": outside the slope triangle");
    TorusBeadConfig c = TorusBeadConfig::from_positions(g, sheared_columns(g, nb, w1, 0));
    if (auto rep = validate(c, &sector); !rep.ok())
      throw UnrealizableSector(why.str() + ": " + rep.message);
    return c;
  }
  if (sector.cross_winding % 4 != 0) throw UnrealizableSector(why.str() + ": fractional winding");
  const int64_t w2 = sector.cross_winding / 4;
  // Shear 2r per column gives e2 winding L/2 - r (mod L); try the nominal
  // shear first, then its images and phase offsets.
  const int64_t r0 = L / 2 - w2;
  for (int64_t k : {0, -1, 1, -2, 2}) {
    for (int64_t phase = 0; phase < nb; ++phase) {
      try {
        TorusBeadConfig c =
            TorusBeadConfig::from_positions(g, sheared_columns(g, nb, 2 * (r0 + k * L), phase));
        if (validate(c, &sector).ok()) return c;
      } catch (const InterlacingViolation&) {
      }
    }
  }
  throw UnrealizableSector(why.str() + ": no sheared staircase realizes it");
}

TorusBeadConfig staircase_config(int L, const Slope& s) {
  const Slope chk = make_slope(s.rho1, s.rho2);
  return staircase_for_sector(Geometry(LatticeKind::kHex, L), hex_sector(L, chk));
}

TorusBeadConfig square_staircase_config(int L, const SquareSlope& s) {
  const SquareSlope chk = make_square_slope(s.rho1, s.rho2);
  if (L < 4 || L % 2 != 0) throw UnrealizableSector("square torus side must be even and >= 4");
  return staircase_for_sector(Geometry(LatticeKind::kSquare, L), square_sector(L, chk));
}

SweepStats mcmc_sweep(TorusBeadConfig& c, Rng& rng) {
  const Geometry& g = c.geometry();
  const int64_t faces = g.face_count();
  const int M = g.positions();
  SweepStats st;
  for (int64_t i = 0; i < faces; ++i) {
    const int64_t f = uniform_below(rng, 2 * faces);
    const Direction d = (f & 1) ? Direction::kDown : Direction::kUp;
    const int64_t idx = f >> 1;
    const Face face{static_cast<int>(idx / M), idx % M};
    ++st.proposals;
    if (c.flippable(face, d)) {
      c.flip(face, d);
      ++st.accepted;
    }
  }
  return st;
}

SweepStats heat_bath_sweep(TorusBeadConfig& c, Rng& rng) {
  const int L = c.geometry().columns();
  const int nb = c.beads_per_column();
  SweepStats st;
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < nb; ++m) {
      const BeadId b{l, m};
      const int64_t lo = c.down_room(b), hi = c.up_room(b);
      ++st.proposals;
      if (lo + hi == 0) continue;
      const int64_t p = c.position(b);
      const int64_t target = p - lo + uniform_below(rng, lo + hi + 1);
      if (target != p) {
        c.move_bead(b, target);
        ++st.accepted;
      }
    }
  return st;
}

TorusBeadConfig seed_config(const SamplerSpec& spec) {
  if (spec.lattice == LatticeKind::kHex) return staircase_config(spec.L, spec.slope);
  return square_staircase_config(spec.L, spec.square_slope);
}

TorusBeadConfig equilibrate(TorusBeadConfig c, const SamplerSpec& spec, Rng& rng,
                            SampleDiagnostics* diag) {
  const int64_t sweeps = spec.burn_in_sweeps >= 0
                             ? spec.burn_in_sweeps
                             : default_burn_in(spec.lattice, spec.L, spec.method);
  SampleDiagnostics d;
  int64_t window_accepted = 0;
  const int window = std::max(1, spec.diagnostic_window);
  for (int64_t s = 0; s < sweeps; ++s) {
    const SweepStats st =
        spec.method == BurnIn::kHeatBath ? heat_bath_sweep(c, rng) : mcmc_sweep(c, rng);
    d.accepted += st.accepted;
    window_accepted += st.accepted;
    ++d.sweeps;
    if ((s + 1) % window == 0) {
      if (window_accepted == 0) ++d.idle_windows;
      window_accepted = 0;
    }
  }
  if (d.idle_windows > 0 && d.sweeps >= window && d.accepted == 0)
    std::cerr << "warning: no move accepted during " << d.sweeps
              << " burn-in sweeps (frozen sector?)\n";
  if (diag != nullptr) *diag = d;
  return c;
}

TorusBeadConfig sample_gibbs(const SamplerSpec& spec, SampleDiagnostics* diag) {
  if (spec.L < 3) throw ConfigError("sampler needs L >= 3");
  if (spec.burn_in_sweeps == 0) throw ConfigError("burn-in must be at least one sweep");
  Rng rng = make_rng(spec.seed);
  return equilibrate(seed_config(spec), spec, rng, diag);
}

}  // namespace beadlab
