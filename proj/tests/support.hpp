#pragma once

// Shared fixtures, random generators and brute-force references for the unit tests.

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "brw/automaton.hpp"
#include "brw/branching.hpp"
#include "brw/group.hpp"
#include "brw/rng.hpp"
#include "brw/walk.hpp"

namespace brw::testing {

inline const TreeSpace& t3() {
  static const TreeSpace s = TreeSpace::create(3);
  return s;
}

inline std::shared_ptr<const RadialAutomaton> s5_automaton() {
  static const auto a = std::make_shared<const RadialAutomaton>(build_radial_automaton(
      t3(), StepDistribution::create(t3(), {{"a", 0.1}, {"b", 0.2}, {"c", 0.1}, {"ab", 0.15}, {"abc", 0.15}, {"ac", 0.3}})));
  return a;
}

inline std::shared_ptr<const RadialAutomaton> nn_automaton() {
  static const auto a = std::make_shared<const RadialAutomaton>(build_radial_automaton(
      t3(), StepDistribution::create(t3(), {{"a", 1.0 / 3}, {"b", 1.0 / 3}, {"c", 1.0 / 3}})));
  return a;
}

inline std::shared_ptr<const RadialAutomaton> make_automaton(
    int d, std::initializer_list<std::pair<std::string_view, double>> atoms) {
  const TreeSpace s = TreeSpace::create(d);
  return std::make_shared<const RadialAutomaton>(build_radial_automaton(s, StepDistribution::create(s, atoms)));
}

inline OffspringDistribution half_one_two() { return OffspringDistribution::create({{1, 0.5}, {2, 0.5}}); }

/// Uniform reduced word of the given length: each letter differs from the previous one.
inline std::vector<Letter> random_reduced(Rng& rng, int d, int length) {
  std::vector<Letter> w;
  for (int i = 0; i < length; ++i) {
    auto l = static_cast<Letter>(rng.below(static_cast<std::uint64_t>(w.empty() ? d : d - 1)));
    if (!w.empty() && l >= w.back()) ++l;
    w.push_back(l);
  }
  return w;
}

/// Possibly unreduced letter string, used to test reduction itself.
inline std::vector<Letter> random_letters(Rng& rng, int d, int length) {
  std::vector<Letter> w;
  for (int i = 0; i < length; ++i) w.push_back(static_cast<Letter>(rng.below(static_cast<std::uint64_t>(d))));
  return w;
}

/// Free reduction of a letter string by a plain stack; independent of WordStack.
inline std::vector<Letter> naive_reduce(const std::vector<Letter>& letters) {
  std::vector<Letter> out;
  for (Letter l : letters) {
    if (!out.empty() && out.back() == l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

/// Law of |Y_n| by pushing the full distribution over reduced words forward.
inline std::vector<std::vector<double>> brute_force_laws(const RadialAutomaton& aut, int n) {
  std::map<std::vector<Letter>, double> cur{{{}, 1.0}};
  std::vector<std::vector<double>> out;
  for (int t = 0; t <= n; ++t) {
    std::vector<double> law(static_cast<std::size_t>(aut.horizon() * t + 1), 0.0);
    for (const auto& [w, p] : cur) law[w.size()] += p;
    out.push_back(law);
    if (t == n) break;
    std::map<std::vector<Letter>, double> next;
    for (const auto& [w, p] : cur) {
      for (int j = 0; j < aut.atom_count(); ++j) {
        std::vector<Letter> cat = w;
        const auto g = aut.atom(j);
        cat.insert(cat.end(), g.begin(), g.end());
        next[naive_reduce(cat)] += p * aut.atom_prob(j);
      }
    }
    cur.swap(next);
  }
  return out;
}

inline double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// |mean − target| ≤ z standard errors of the mean.
inline bool within_se(const std::vector<double>& xs, double target, double z = 4.0) {
  const double m = sample_mean(xs);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  const double se = std::sqrt(v / static_cast<double>(xs.size()));
  return std::abs(m - target) <= z * se + 1e-12 * std::abs(target);
}

}  // namespace brw::testing
