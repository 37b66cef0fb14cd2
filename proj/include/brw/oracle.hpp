#pragma once

// Exact first and second moments of small branching random walks by
// exhaustive enumeration of first-generation outcomes.
//
// Every particle's subtree is a fresh copy of the whole process started from
// its position, so the expectation for a particle at word w and r remaining
// generations is a sum over (offspring count k, atoms g_1..g_k) with weight
// π(k)·μ(g_1)⋯μ(g_k) of the children's expectations at w·g_i. Pair sums add
// the cross terms between distinct children, whose subtrees are independent.
// Positions are kept as full reduced words, so nothing here relies on the
// suffix automaton or the radial DP it is meant to check.

#include <functional>
#include <string>
#include <vector>

#include "brw/automaton.hpp"
#include "brw/branching.hpp"

namespace brw {

struct EnumerationBudget {
  int max_depth = 4;
  int max_offspring = 8;
  int max_step_atoms = 64;
  /// Limit on the number of weighted outcome tuples visited.
  double max_paths = 1e8;
};

/// Tuples the enumeration would visit: Σ_{r=1..n} |μ|^{n−r} Σ_k |μ|^k.
double enumeration_size(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n);

/// Throws BudgetExceeded naming the exceeded limit.
void check_budget(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                  const EnumerationBudget& budget);

/// Σ_k π(k) Σ_{g_1..g_k} μ(g_1)⋯μ(g_k), the total weight of one generation's outcomes.
double enumeration_mass(const OffspringDistribution& pi, const RadialAutomaton& automaton);

/// m[a] = E[#{v ∈ T_n : |X_v| = a}].
std::vector<double> exact_distance_measure(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                                           const EnumerationBudget& budget = {});

/// E[Σ_{v ∈ T_n} f(|X_v|)].
double exact_functional(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                        const std::function<double(int)>& f, const EnumerationBudget& budget = {});

/// E[Σ_{v1, v2 ∈ T_n} f(|X_v1|, |X_v2|)] over ordered pairs, v1 = v2 included.
double exact_pair_functional(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                             const std::function<double(int, int)>& f, const EnumerationBudget& budget = {});

struct IdentityCheck {
  std::string identity;
  std::string parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool pass = false;
};

inline constexpr double kOracleTolerance = 1e-10;

/// Enumeration against ρ^n·E[f(|Y_n|)] from the radial DP for f in
/// {1, identity, square, indicator of [0, 2]}.
std::vector<IdentityCheck> verify_many_to_one(const OffspringDistribution& pi, const RadialAutomaton& automaton,
                                              int n, double tolerance = kOracleTolerance,
                                              const EnumerationBudget& budget = {});

/// Enumerated E[Z_n²] against ρ^{2n}·E[W_n²] from the closed form.
IdentityCheck verify_second_moment(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                                   double tolerance = kOracleTolerance, const EnumerationBudget& budget = {});

}  // namespace brw
