#include "brw/walk.hpp"

#include <cmath>
#include <numeric>

#include "brw/error.hpp"
#include "brw/radial_dp.hpp"
#include "brw/stats.hpp"

namespace brw {

double RadialLaw::total() const noexcept {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

double RadialLaw::mean() const noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) s += static_cast<double>(k) * masses[k];
  return s;
}

double RadialLaw::variance() const noexcept {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double dev = static_cast<double>(k) - mu;
    s += dev * dev * masses[k];
  }
  return s;
}

std::vector<int> sample_walk(const RadialAutomaton& automaton, int n, Rng& rng) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  WordStack word;
  out.push_back(0);
  for (int i = 0; i < n; ++i) {
    word.apply(automaton.atom(automaton.sample_atom(rng)));
    out.push_back(static_cast<int>(word.size()));
  }
  return out;
}

namespace {

void check_cap(const RadialAutomaton& automaton, int n, long long distance_cap) {
  if (n < 0) throw ValidationError("n", "step count must be nonnegative");
  const long long reach = static_cast<long long>(n) * automaton.horizon();
  if (reach > distance_cap)
    throw BudgetExceeded("exact radial law: n*L = " + std::to_string(reach) + " exceeds the distance cap " +
                         std::to_string(distance_cap));
}

}  // namespace

std::vector<RadialLaw> exact_radial_laws(const RadialAutomaton& automaton, int n, long long distance_cap) {
  check_cap(automaton, n, distance_cap);
  RadialDp dp(automaton);
  return dp.laws(n);
}

RadialLaw exact_radial_law(const RadialAutomaton& automaton, int n, long long distance_cap) {
  auto all = exact_radial_laws(automaton, n, distance_cap);
  return std::move(all.back());
}

std::string to_string(EstimateMethod m) { return m == EstimateMethod::ExactDp ? "exact-dp" : "monte-carlo"; }

SpeedEstimate speed(const RadialLaw& law) {
  if (law.n < 1) throw ValidationError("n", "speed needs n >= 1");
  return {law.mean() / law.n, 0.0, law.n, EstimateMethod::ExactDp};
}

SpeedEstimate speed(const RadialAutomaton& automaton, int n) {
  if (n < 1) throw ValidationError("n", "speed needs n >= 1");
  RadialDp dp(automaton);
  const auto m = dp.moments(n);
  return {m.back().mean / n, 0.0, n, EstimateMethod::ExactDp};
}

SpeedEstimate speed_monte_carlo(const RadialAutomaton& automaton, int n, int walkers, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n", "speed needs n >= 1");
  if (walkers < 2) throw ValidationError("walkers", "need at least two walkers");
  RunningStats stats;
  for (int i = 0; i < walkers; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const auto path = sample_walk(automaton, n, rng);
    stats.add(static_cast<double>(path.back()) / n);
  }
  return {stats.mean(), stats.std_error(), n, EstimateMethod::MonteCarlo};
}

SigmaEstimate estimate_sigma(const RadialAutomaton& automaton, double ell, int n) {
  if (n < 2) throw ValidationError("n", "sigma estimation needs n >= 2");
  if (!(ell >= 0.0 && ell <= automaton.horizon())) throw ValidationError("ell", "speed must lie in [0, L]");
  RadialDp dp(automaton);
  const DistanceMoments m = dp.moments(n).back();
  const double var = std::max(0.0, m.second - m.mean * m.mean);
  SigmaEstimate s;
  s.point = std::sqrt(var / n);
  s.n_used = n;
  s.degenerate = s.point < kSigmaDegenerateBelow;
  return s;
}

SigmaEstimate estimate_sigma_monte_carlo(const RadialAutomaton& automaton, double ell, int n, int walkers,
                                         std::uint64_t seed) {
  if (n < 2) throw ValidationError("n", "sigma estimation needs n >= 2");
  if (walkers < 3) throw ValidationError("walkers", "need at least three walkers");
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(walkers));
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < walkers; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const auto path = sample_walk(automaton, n, rng);
    z.push_back((path.back() - n * ell) / root_n);
  }
  const auto jk = jackknife_std_dev(z);
  SigmaEstimate s;
  s.point = jk.point;
  s.std_error = jk.std_error;
  s.n_used = n;
  s.degenerate = s.point < kSigmaDegenerateBelow;
  return s;
}

SpeedReference reference_speed(const RadialAutomaton& automaton, int n_ell) {
  if (n_ell < 2) throw ValidationError("n_ell", "reference step count must be >= 2");
  RadialDp dp(automaton);
  const auto m = dp.moments(n_ell);
  const double full = m[static_cast<std::size_t>(n_ell)].mean / n_ell;
  const int half = n_ell / 2;
  const double halfway = m[static_cast<std::size_t>(half)].mean / half;
  return {full, std::abs(full - halfway), n_ell};
}

double exp_moment(const StepDistribution& sd, double t) {
  double s = 0.0;
  for (const auto& a : sd.atoms()) s += a.prob * std::exp(t * static_cast<double>(a.word.size()));
  return s;
}

double exp_moment(const RadialLaw& law, double t) {
  return law.expect([t](double k) { return std::exp(t * k); });
}

std::complex<double> char_fn(const RadialLaw& law, double t) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t k = 0; k < law.masses.size(); ++k)
    s += law.masses[k] * std::polar(1.0, t * static_cast<double>(k));
  return s;
}

}  // namespace brw
