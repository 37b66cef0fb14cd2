#pragma once

// Two-spine (many-to-two) construction: only the marked lines of descent are
// simulated. While both marks sit on one particle it branches with the
// second-order size-biased law π^{(2)} and each mark picks a child uniformly
// and independently; once apart, each spine branches with π^{(1)} and moves
// on its own.

#include <cstdint>
#include <vector>

#include "brw/automaton.hpp"
#include "brw/branching.hpp"

namespace brw {

inline constexpr int kNotSplit = -1;

struct SpineRun {
  int n = 0;
  /// Last generation at which both marks share a particle, or kNotSplit when
  /// they still coincide at generation n.
  int tau = kNotSplit;
  int d1 = 0;  // |ζ_n^1|
  int d2 = 0;  // |ζ_n^2|
  /// Product over skeleton vertices v of w_{D_{p(v)}}, accumulated generation by generation.
  double weight = 1.0;
  /// d(ζ_τ, ζ_n^i): displacement of each spine after the split. Zero when not split.
  int post1 = 0;
  int post2 = 0;
};

/// Skeleton weight θ^k·θ²·ρ^{2(n−k−1)} for a split at k < n, θ^n for
/// k = kNotSplit. The factors are multiplied in generation order, which is
/// the order sample_two_spine uses, so the two agree bit for bit.
double skeleton_weight(const Moments& m, int n, int k);

/// The same weight in the factored form ρ^{2n}(θ/ρ)²(θ/ρ²)^k.
double skeleton_weight_factored(const Moments& m, int n, int k);

/// One two-spine run to horizon n.
SpineRun sample_two_spine(const RadialAutomaton& automaton, const OffspringDistribution& pi, int n, Rng& rng);

/// Runs stream(seed, i) for i in [0, runs), in index order.
std::vector<SpineRun> sample_two_spines(const RadialAutomaton& automaton, const OffspringDistribution& pi, int n,
                                        int runs, std::uint64_t seed, int threads = 1);

/// Per-generation probability that the marks stay together, Σ_k π^{(2)}(k)/k.
double stay_probability(const OffspringDistribution& pi);

/// P̂(τ = k) for k < n and P̂(τ ≥ n) (last entry) under uniform child choice.
std::vector<double> tau_law(const OffspringDistribution& pi, int n);

struct TauSeries {
  double estimate = 0.0;  // (θ/ρ)² Σ_{k ≤ T} p̂(k)(θ/ρ²)^k
  /// (θ/ρ)²·p̂(τ > T)·(θ/ρ²)^{T+1}: the first term the truncation leaves out,
  /// carrying all remaining mass. For θ ≥ ρ² it bounds the remainder from below.
  double tail = 0.0;
  int truncation = 0;
  int runs = 0;
};

/// Throws ValidationError when the truncation exceeds the run horizon.
TauSeries tau_series_estimate(const std::vector<SpineRun>& runs, const Moments& m, int truncation);

/// Value of the same series under the exact tau law, summed to infinity.
/// Infinite when s·θ/ρ² ≥ 1.
double tau_series_exact(const OffspringDistribution& pi);

struct CalibrationRow {
  int n = 0;
  double exact = 0.0;         // E[Z_n²] from the second-moment recursion
  double brute_force = 0.0;   // E[Z_n²] by exhaustive enumeration
  double spine_mean = 0.0;    // Ê[skeleton weight]
  double spine_se = 0.0;
  double ratio = 0.0;         // spine_mean / exact
  double ratio_se = 0.0;
  double spine_exact = 0.0;   // E[skeleton weight] under the exact tau law
  /// Same statistics with the split generation weighted θ instead of θ²,
  /// i.e. θ^{k+1}ρ^{2(n−k−1)}: one factor per branching parent.
  double per_parent_mean = 0.0;
  double per_parent_ratio = 0.0;
  double per_parent_ratio_se = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationRow> rows;
  int runs = 0;
  double limit_ew2 = 0.0;  // 1 + (θ − ρ²)/(ρ(ρ − 1))
  double series_exact = 0.0;     // tau_series_exact
  /// True when every pair of ratios differs by less than `z` combined standard errors.
  bool ratio_constant = false;
  double max_ratio_z = 0.0;
};

/// Confronts E[Z_n²] with the spine expectation for n = 1..max_n (≤ 3).
CalibrationReport calibrate_normalization(const RadialAutomaton& automaton, const OffspringDistribution& pi,
                                          int max_n, int runs, std::uint64_t seed, double z = 4.0,
                                          int threads = 1);

}  // namespace brw
