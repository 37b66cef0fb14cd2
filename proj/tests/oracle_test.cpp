#include <functional>

#include "brw/error.hpp"
#include "brw/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brw;

namespace {

using Positions = std::vector<std::vector<Letter>>;

// Walks every realization of the whole population generation by generation
// (offspring count and step of each particle) and hands each final
// population to `visit` with its probability.
void realizations(const OffspringDistribution& pi, const RadialAutomaton& aut, const Positions& gen, int left,
                  double p, const std::function<void(const Positions&, double)>& visit) {
  if (left == 0) {
    visit(gen, p);
    return;
  }
  // Expand particle i of `gen`, accumulating the children in `next`.
  std::function<void(std::size_t, Positions&, double)> expand = [&](std::size_t i, Positions& next, double q) {
    if (i == gen.size()) {
      realizations(pi, aut, next, left - 1, q, visit);
      return;
    }
    for (const auto& atom : pi.atoms()) {
      std::function<void(int, double)> children = [&](int c, double r) {
        if (c == atom.k) {
          expand(i + 1, next, r);
          return;
        }
        for (int j = 0; j < aut.atom_count(); ++j) {
          std::vector<Letter> w = gen[i];
          w.insert(w.end(), aut.atom(j).begin(), aut.atom(j).end());
          next.push_back(brw::testing::naive_reduce(w));
          children(c + 1, r * aut.atom_prob(j));
          next.pop_back();
        }
      };
      children(0, q * atom.prob);
    }
  };
  Positions next;
  expand(0, next, p);
}

struct Realized {
  double total_prob = 0.0;
  double f_sum = 0.0;
  double z_sq = 0.0;
};

Realized enumerate(const OffspringDistribution& pi, const RadialAutomaton& aut, int n,
                   const std::function<double(int)>& f) {
  Realized out;
  realizations(pi, aut, Positions{{}}, n, 1.0, [&](const Positions& pop, double p) {
    out.total_prob += p;
    double s = 0.0;
    for (const auto& w : pop) s += f(static_cast<int>(w.size()));
    out.f_sum += p * s;
    out.z_sq += p * static_cast<double>(pop.size() * pop.size());
  });
  return out;
}

std::vector<OffspringDistribution> laws() {
  return {OffspringDistribution::point_mass(1), OffspringDistribution::point_mass(2), brw::testing::half_one_two()};
}

}  // namespace

TEST_CASE("oracle agrees with whole-population enumeration") {
  const std::function<double(int)> square = [](int k) { return static_cast<double>(k * k); };
  for (const auto& aut : {brw::testing::nn_automaton(), brw::testing::s5_automaton()}) {
    for (const auto& pi : laws()) {
      for (int n = 0; n <= 2; ++n) {
        const auto r = enumerate(pi, *aut, n, square);
        CHECK(r.total_prob == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(exact_functional(pi, *aut, n, square) == doctest::Approx(r.f_sum).epsilon(1e-12));
        CHECK(exact_pair_functional(pi, *aut, n, [](int, int) { return 1.0; }) ==
              doctest::Approx(r.z_sq).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("oracle examples") {
  const auto nn = brw::testing::nn_automaton();
  const auto s5 = brw::testing::s5_automaton();
  const auto pi = brw::testing::half_one_two();
  const auto ident = [](int k) { return static_cast<double>(k); };
  const auto one = [](int) { return 1.0; };

  CHECK(exact_functional(OffspringDistribution::point_mass(2), *nn, 1, ident) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(exact_functional(pi, *s5, 2, one) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(exact_functional(pi, *s5, 1, ident) == doctest::Approx(2.625).epsilon(1e-14));

  const auto pair_one = [](int, int) { return 1.0; };
  CHECK(exact_pair_functional(pi, *s5, 1, pair_one) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(exact_pair_functional(pi, *s5, 2, pair_one) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(exact_pair_functional(OffspringDistribution::point_mass(2), *nn, 3, pair_one) == doctest::Approx(64.0));
  CHECK(exact_pair_functional(pi, *s5, 0, [](int a, int b) { return 3.0 + a + b; }) == 3.0);

  // A single particle: the pair sum is the diagonal E|Y_n|².
  const auto law = exact_radial_law(*s5, 3);
  CHECK(exact_pair_functional(OffspringDistribution::point_mass(1), *s5, 3,
                              [](int a, int b) { return static_cast<double>(a * b); }) ==
        doctest::Approx(law.expect([](double k) { return k * k; })).epsilon(1e-12));

  const auto measure = exact_distance_measure(pi, *s5, 2);
  double mass = 0.0;
  for (double v : measure) mass += v;
  CHECK(mass == doctest::Approx(2.25).epsilon(1e-14));
}

TEST_CASE("identity battery") {
  for (const auto& aut : {brw::testing::nn_automaton(), brw::testing::s5_automaton()}) {
    for (const auto& pi : laws()) {
      for (int n = 0; n <= 3; ++n) {
        for (const auto& c : verify_many_to_one(pi, *aut, n)) {
          INFO(c.identity << " " << c.parameters);
          CHECK(c.pass);
          CHECK(c.residual < 1e-10);
          if (pi.max_k() == 1) CHECK(c.residual < 1e-12);
          if (n == 0) CHECK(c.lhs == c.rhs);
        }
        CHECK(verify_second_moment(pi, *aut, n).pass);
      }
    }
  }
  CHECK(verify_second_moment(OffspringDistribution::point_mass(2), *brw::testing::nn_automaton(), 3).lhs ==
        doctest::Approx(64.0));
}

TEST_CASE("enumeration mass and budget") {
  for (const auto& aut : {brw::testing::nn_automaton(), brw::testing::s5_automaton()})
    for (const auto& pi : laws()) CHECK(enumeration_mass(pi, *aut) == doctest::Approx(1.0).epsilon(1e-12));

  const auto s5 = brw::testing::s5_automaton();
  const auto pi = brw::testing::half_one_two();
  CHECK_THROWS_AS(check_budget(pi, *s5, 5, {}), BudgetExceeded);
  EnumerationBudget tight;
  tight.max_paths = 10;
  CHECK_THROWS_AS(exact_functional(pi, *s5, 2, [](int) { return 1.0; }, tight), BudgetExceeded);
  EnumerationBudget narrow;
  narrow.max_offspring = 1;
  CHECK_THROWS_AS(check_budget(pi, *s5, 1, narrow), BudgetExceeded);
  CHECK_NOTHROW(check_budget(pi, *s5, 3, {}));
  CHECK(enumeration_size(pi, *s5, 1) == doctest::Approx(6.0 + 36.0));
}
