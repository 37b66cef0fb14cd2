#pragma once

// Exact law of the distance process |Y_n| of a finite-range walk on T_d.
//
// The reduced word of Y_n behaves as a stack driven by the pushdown program
// of the automaton: every micro-move reads only the top letter. A letter that
// is on the stack at time t was pushed at some earlier time and never popped,
// so the path splits at the pushes of the letters that survive, and between
// two such pushes the walk performs an excursion above the newest surviving
// letter. Excursion probabilities depend only on that letter and on the
// control state, so they are tabulated once:
//
//   N_X[q0 → q](m)   visit control q with X on top after m atom draws, having
//                    started in q0 with X on top and never popped X;
//   P_Y[q1 → q2](m)  starting in q1 just after pushing Y, pop that Y for the
//                    first time after m atom draws, arriving in control q2.
//
//   N_X[U] = δ + Σ_{m1} P_{g}[after_push(U)] ∗ N_X[·]   (U pushes letter g)
//   N_X[Pop(j,i)] = δ + [X ≠ g_i] N_X[Push(j,i)]
//   N_X[idle](m) = δ + Σ_j μ_j N_X[Pop(j,0)](m − 1)
//
// The forward law then convolves surviving pushes with N. Everything is a
// finite sum of products of atom probabilities, so the result is exact up to
// floating-point rounding.
//
// For a transient walk both tables decay geometrically in m. Once the decay
// is established and the remaining tail is below `tail_tolerance`, lags
// beyond that point are dropped from every convolution, which turns the
// quadratic cost in n into a linear one. A tolerance of 0 keeps every lag;
// recurrent walks never meet the test and are always computed in full.

#include <algorithm>
#include <vector>

#include "brw/automaton.hpp"

namespace brw {

struct RadialLaw;

struct DistanceMoments {
  double mean = 0.0;    // E|Y_t|
  double second = 0.0;  // E|Y_t|²
};

class RadialDp {
 public:
  explicit RadialDp(const RadialAutomaton& automaton, double tail_tolerance = kDefaultTailTolerance);

  static constexpr double kDefaultTailTolerance = 1e-17;

  /// Laws of |Y_0|, ..., |Y_n|.
  std::vector<RadialLaw> laws(int n);
  /// First two moments of |Y_0|, ..., |Y_n| without materializing the laws.
  std::vector<DistanceMoments> moments(int n);

  /// Largest convolution lag in use; 0 while every lag is kept.
  int lag_limit() const noexcept { return lag_limit_; }

 private:
  void extend(int m);
  void update_lag_limit(int m, const std::vector<double>& nm, const std::vector<double>& pm);
  int lag_cap(int t) const noexcept { return lag_limit_ > 0 ? std::min(t, lag_limit_) : t; }

  std::size_t slot(int x, int q0, int q) const noexcept {
    return (static_cast<std::size_t>(x) * static_cast<std::size_t>(controls_) + static_cast<std::size_t>(q0)) *
               static_cast<std::size_t>(controls_) +
           static_cast<std::size_t>(q);
  }

  const RadialAutomaton* automaton_;
  const PushdownProgram* program_;
  int letters_ = 0;   // d; index d is the empty-stack marker
  int controls_ = 0;
  // n_[m][slot(X, q0, q)] = N_X[q0 → q](m); p_[m][slot(Y, q1, q2)] = P_Y[q1 → q2](m).
  std::vector<std::vector<double>> n_;
  std::vector<std::vector<double>> p_;
  std::vector<int> push_controls_;
  std::vector<int> post_pop_controls_;
  double tail_tolerance_;
  int lag_limit_ = 0;
  std::vector<double> amplitude_;  // largest table entry at each m ≥ 1
};

}  // namespace brw
