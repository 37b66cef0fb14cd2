#pragma once

// The underlying random walk Y_n = ξ_1 ξ_2 ⋯ ξ_n and its distance process:
// Monte Carlo trajectories, exact radial laws, speed ℓ, CLT constant σ,
// exponential moments and characteristic functions.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "brw/automaton.hpp"
#include "brw/rng.hpp"

namespace brw {

/// Law of |Y_n|. masses[k] = P(|Y_n| = k), dense over [0, nL].
struct RadialLaw {
  int n = 0;
  std::vector<double> masses;

  double mass(std::size_t k) const noexcept { return k < masses.size() ? masses[k] : 0.0; }
  double total() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;
  /// E[f(|Y_n|)].
  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) s += masses[k] * f(static_cast<double>(k));
    return s;
  }
};

/// Distances |Y_0|, ..., |Y_n| of one trajectory started at the origin.
std::vector<int> sample_walk(const RadialAutomaton& automaton, int n, Rng& rng);

inline constexpr long long kDefaultDistanceCap = 1'000'000;

/// Exact law of |Y_n|. Throws BudgetExceeded when n·L exceeds `distance_cap`.
RadialLaw exact_radial_law(const RadialAutomaton& automaton, int n, long long distance_cap = kDefaultDistanceCap);
/// Laws of |Y_0|..|Y_n| from one pass.
std::vector<RadialLaw> exact_radial_laws(const RadialAutomaton& automaton, int n,
                                         long long distance_cap = kDefaultDistanceCap);

enum class EstimateMethod { ExactDp, MonteCarlo };

std::string to_string(EstimateMethod m);

struct SpeedEstimate {
  double point = 0.0;
  double std_error = 0.0;
  int n_used = 0;
  EstimateMethod method = EstimateMethod::ExactDp;
};

struct SigmaEstimate {
  double point = 0.0;
  double std_error = 0.0;
  int n_used = 0;
  bool degenerate = false;
};

inline constexpr double kSigmaDegenerateBelow = 1e-9;

/// E|Y_n| / n from the exact law.
SpeedEstimate speed(const RadialLaw& law);
/// E|Y_n| / n by exact DP.
SpeedEstimate speed(const RadialAutomaton& automaton, int n);
/// Sample mean of |Y_n|/n over `walkers` independent walks of stream(seed, i).
SpeedEstimate speed_monte_carlo(const RadialAutomaton& automaton, int n, int walkers, std::uint64_t seed);

/// Standard deviation of (|Y_n| − nℓ)/√n by exact DP. `ell` is checked
/// against [0, L] but does not affect the result: shifting by nℓ leaves the
/// spread unchanged. Degenerate laws are flagged, not thrown.
SigmaEstimate estimate_sigma(const RadialAutomaton& automaton, double ell, int n);
/// Sample standard deviation of (|Y_n| − nℓ)/√n with a jackknife standard error.
SigmaEstimate estimate_sigma_monte_carlo(const RadialAutomaton& automaton, double ell, int n, int walkers,
                                         std::uint64_t seed);

/// Reference speed ℓ̂(n_ℓ) with the finite-n bias proxy |ℓ̂(n_ℓ) − ℓ̂(n_ℓ/2)|.
struct SpeedReference {
  double ell = 0.0;
  double bias = 0.0;
  int n = 0;
};
SpeedReference reference_speed(const RadialAutomaton& automaton, int n_ell);

/// ϑ_1(t) = Σ_x e^{t|x|} μ(x).
double exp_moment(const StepDistribution& sd, double t);

/// ϑ_n(t) = E[e^{t|Y_n|}] from an exact law.
double exp_moment(const RadialLaw& law, double t);

/// φ_n(t) = E[e^{it|Y_n|}].
std::complex<double> char_fn(const RadialLaw& law, double t);

}  // namespace brw
