#pragma once

// Generation-by-generation simulation of the branching random walk.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "brw/automaton.hpp"
#include "brw/branching.hpp"

namespace brw {

inline constexpr std::uint64_t kDefaultParticleCap = 10'000'000;

struct BrwRunConfig {
  std::shared_ptr<const RadialAutomaton> automaton;
  OffspringDistribution offspring;
  int horizon = 1;
  std::uint64_t cap = kDefaultParticleCap;
  std::uint64_t seed = 0;
  int replicates = 1;
  /// Keep each particle's whole reduced word instead of a bounded window.
  /// Slower, same output for the same seed.
  bool full_word = false;

  /// Throws ValidationError on the first bad field. Also throws
  /// BudgetExceeded when the packed particle window cannot cover the horizon.
  void validate() const;
};

/// Radially aggregated state of one generation.
struct GenerationSnapshot {
  int n = 0;
  std::uint64_t z = 0;
  double rho_n = 1.0;               // ρ^n
  double w = 1.0;                   // Z_n / ρ^n
  std::vector<std::uint64_t> hist;  // hist[k] = particles at distance k
  double h = 0.0;                   // ρ^{-n} Σ |X_v|
  double l = 0.0;                   // H_n / n, zero at n = 0
  int max_dist = 0;
};

/// Snapshots 0..horizon of replicate `replicate`, driven by Rng::stream(seed, replicate).
/// Throws CapExceeded when a generation would hold more than cfg.cap particles.
std::vector<GenerationSnapshot> run_brw(const BrwRunConfig& cfg, int replicate);

/// Letters a packed particle window can hold for a space of degree d.
int packed_window_capacity(int d) noexcept;

/// Deepest stored letter any step can still read: max over generations k of
/// min(L·k, L·(n − k)).
int required_window(int horizon, int step_horizon) noexcept;

/// L_n read back from the histogram.
double mean_displacement(const GenerationSnapshot& snap);

/// ρ^{-n}·#{v : (|X_v| − nℓ)/(σ√n) ≤ x} at each x of the grid.
std::vector<double> rescaled_cdf(const GenerationSnapshot& snap, double ell, double sigma, std::span<const double> xs);

/// M_n*([a, b]): mass of particles whose rescaled distance lies in [a, b].
double interval_mass(const GenerationSnapshot& snap, double a, double b, double ell, double sigma);

}  // namespace brw
