#pragma once

// Experiments that turn the limit theorems into finite-n statistics. Each one
// fans out over replicates (stream(seed, r) per replicate) and reduces in
// replicate order, so every number is a pure function of its inputs.

#include <cstdint>
#include <string>
#include <vector>

#include "brw/population.hpp"

namespace brw {

struct Statistic {
  std::string name;
  int n = 0;
  double param = 0.0;  // t, x or a depending on the statistic; 0 when unused
  double point = 0.0;
  double std_error = 0.0;
  int replicates = 0;
  /// Exact counterpart when one exists (NaN otherwise).
  double reference = 0.0;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Replicate-level rows written next to the report (scatter data).
struct DetailTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Statistic> stats;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  DetailTable detail;

  bool passed() const noexcept {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
  const Statistic* find(const std::string& name, int n, double param = 0.0) const noexcept;
};

struct ExperimentSetup {
  BrwRunConfig brw;
  int threads = 1;
};

/// Reference constants of the underlying walk.
struct WalkReference {
  double ell = 0.0;
  double ell_bias = 0.0;
  int n_ell = 0;
  double sigma = 0.0;
  int n_sigma = 0;
};

WalkReference walk_reference(const RadialAutomaton& automaton, int n_ell, int n_sigma);

/// Per replicate, the snapshots at each horizon of ns (strictly increasing).
using ReplicateSnapshots = std::vector<std::vector<GenerationSnapshot>>;
ReplicateSnapshots collect_snapshots(const ExperimentSetup& setup, const std::vector<int>& ns);

// Each experiment below either runs its own replicates or reads snapshots
// collected with the same setup and horizons, so that several experiments can
// share one set of runs.

/// E[(L_n − ℓ_n W_n)²] per horizon with ℓ_n = E|Y_n|/n exact, plus the median
/// of |L_n/W_n − ℓ_n|/ℓ_n at the last horizon.
ExperimentReport lln_experiment(const ExperimentSetup& setup, const std::vector<int>& ns,
                                double median_threshold = 0.10);
ExperimentReport lln_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                const std::vector<int>& ns, double median_threshold = 0.10);

/// Mean of L_n·W_n against ℓ_n·E[W_n²] (both exact).
ExperimentReport mixed_moment_experiment(const ExperimentSetup& setup, int n);

/// Grid of the sup-distance: −3.0, −2.9, …, 3.0.
std::vector<double> clt_grid();

/// Mean over replicates of D_n = max_x |M_n*((−∞, x])/W_n − Φ(x)| on clt_grid().
ExperimentReport clt_experiment(const ExperimentSetup& setup, const std::vector<int>& ns, double ell, double sigma,
                                double d_threshold = 0.10);
ExperimentReport clt_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                const std::vector<int>& ns, double ell, double sigma, double d_threshold = 0.10);

/// E|Ψ_n(t/(σ√n)) − W_n φ_n(t/(σ√n))|² per (n, t).
ExperimentReport chargap_experiment(const ExperimentSetup& setup, const std::vector<int>& ns,
                                    const std::vector<double>& ts, double sigma);
ExperimentReport chargap_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                    const std::vector<int>& ns, const std::vector<double>& ts, double sigma);

/// Frequency of {Max_n ≥ na} against the bound (ρ ϑ_1(t) e^{−ta})^n for each a.
ExperimentReport maxdisp_experiment(const ExperimentSetup& setup, const std::vector<int>& ns, double t,
                                    const std::vector<double>& as);
ExperimentReport maxdisp_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                    const std::vector<int>& ns, double t, const std::vector<double>& as);

/// Sample means of W_n and W_n² from generation sizes alone.
ExperimentReport martingale_experiment(const OffspringDistribution& pi, const std::vector<int>& ns, int replicates,
                                       std::uint64_t seed, std::uint64_t cap, int threads = 1);

/// Single-walk (π = δ1) exact counterparts of the experiment statistics.
namespace single_walk {

/// E[(|Y_n|/n − ℓ_n)²].
double lln_gap(const RadialAutomaton& automaton, int n);
/// max over the grid of |P(|Y_n| ≤ nℓ + xσ√n) − Φ(x)|: D_n of a lone particle has
/// expectation E[max_x |1{...} − Φ(x)|], computed here from the exact law.
double expected_sup_distance(const RadialAutomaton& automaton, int n, double ell, double sigma);
/// 1 − |φ_n(t/(σ√n))|².
double chargap(const RadialAutomaton& automaton, int n, double t, double sigma);

}  // namespace single_walk

}  // namespace brw
