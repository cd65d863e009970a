#pragma once

#include <cstdint>

#include "beadlab/bead_config.hpp"
#include "beadlab/hex_lattice.hpp"
#include "beadlab/rng.hpp"
#include "beadlab/square_lattice.hpp"

namespace beadlab {

enum class BurnIn { kHeatBath, kFlip };

struct SamplerSpec {
  LatticeKind lattice = LatticeKind::kHex;
  int L = 16;
  Slope slope;                // hex
  SquareSlope square_slope;   // square
  // Negative selects the default for the method (see default_burn_in).
  int64_t burn_in_sweeps = -1;
  BurnIn method = BurnIn::kHeatBath;
  uint64_t seed = 1;
  // Sweeps per block of accepted-move counting in the diagnostics.
  int diagnostic_window = 100;
};

int64_t default_burn_in(LatticeKind lattice, int L, BurnIn method);

// Deterministic member of the sector: beads per column evenly spread with a
// cross-column shear. Throws UnrealizableSector when no such member exists.
TorusBeadConfig staircase_config(int L, const Slope& s);
TorusBeadConfig square_staircase_config(int L, const SquareSlope& s);
TorusBeadConfig staircase_for_sector(const Geometry& g, const Sector& sector);

struct SweepStats {
  int64_t proposals = 0;
  int64_t accepted = 0;
};

// face_count() proposals: uniform face and direction, flip if flippable.
SweepStats mcmc_sweep(TorusBeadConfig& c, Rng& rng);

// Every bead, in canonical order, is resampled uniformly on the interval it
// can reach with the other beads fixed.
SweepStats heat_bath_sweep(TorusBeadConfig& c, Rng& rng);

struct SampleDiagnostics {
  int64_t sweeps = 0;
  int64_t accepted = 0;
  int64_t idle_windows = 0;  // windows with no accepted move
};

TorusBeadConfig sample_gibbs(const SamplerSpec& spec, SampleDiagnostics* diag = nullptr);
// Same, starting from a given configuration.
TorusBeadConfig equilibrate(TorusBeadConfig c, const SamplerSpec& spec, Rng& rng,
                            SampleDiagnostics* diag = nullptr);
TorusBeadConfig seed_config(const SamplerSpec& spec);

}  // namespace beadlab
