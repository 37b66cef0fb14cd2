#include "brw/error.hpp"
#include "brw/stats.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brw;

TEST_CASE("moments and criticality flags") {
  const auto m = moments(brw::testing::half_one_two());
  CHECK(m.moments.rho == 1.5);
  CHECK(m.moments.theta == 2.5);
  CHECK(m.criticality == Criticality::Supercritical);
  CHECK(m.flag.empty());

  const auto one = moments(OffspringDistribution::point_mass(1));
  CHECK(one.moments.rho == 1.0);
  CHECK(one.moments.theta == 1.0);
  CHECK(one.criticality == Criticality::Critical);
  CHECK_FALSE(one.flag.empty());

  const auto two = moments(OffspringDistribution::point_mass(2));
  CHECK(two.moments.rho == 2.0);
  CHECK(two.moments.theta == 4.0);
}

TEST_CASE("offspring validation") {
  CHECK_THROWS_AS(OffspringDistribution::create({{0, 0.5}, {2, 0.5}}), ValidationError);
  CHECK_THROWS_AS(OffspringDistribution::create({{1, 0.5}, {2, 0.4}}), ValidationError);
  CHECK_THROWS_AS(OffspringDistribution::create({{1, 0.5}, {1, 0.5}}), ValidationError);
  CHECK_THROWS_AS(OffspringDistribution::create({{1, -0.5}, {2, 1.5}}), ValidationError);
  try {
    OffspringDistribution::create({{1, 0.5}, {0, 0.5}});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "offspring[1]");
  }
}

TEST_CASE("size biasing") {
  const auto pi = brw::testing::half_one_two();
  const auto s1 = size_biased(pi, 1);
  CHECK(s1.prob(1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(s1.prob(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  const auto s2 = size_biased(pi, 2);
  CHECK(s2.prob(1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s2.prob(2) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_THROWS_AS(size_biased(pi, 3), ValidationError);

  // Point masses are fixed points; random laws stay normalized.
  for (int k = 1; k <= 6; ++k)
    for (int j = 1; j <= 2; ++j) {
      const auto b = size_biased(OffspringDistribution::point_mass(k), j);
      REQUIRE(b.atoms().size() == 1);
      CHECK(b.prob(k) == 1.0);
    }
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<OffspringAtom> atoms;
    double total = 0.0;
    const int support = 1 + static_cast<int>(rng.below(6));
    for (int k = 1; k <= support; ++k) {
      atoms.push_back({k, 0.05 + rng.uniform()});
      total += atoms.back().prob;
    }
    for (auto& a : atoms) a.prob /= total;
    double sum = 0.0;
    for (auto& a : atoms) sum += a.prob;
    atoms.back().prob += 1.0 - sum;
    const auto pi2 = OffspringDistribution::create(atoms);
    for (int j = 1; j <= 2; ++j) {
      const auto biased = size_biased(pi2, j);
      double s = 0.0;
      for (const auto& a : biased.atoms()) s += a.prob;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("second moment closed forms") {
  const Moments m{1.5, 2.5};
  CHECK(exact_second_moment_Wn(m, 0) == 1.0);
  CHECK(exact_second_moment_Wn(m, 1) == doctest::Approx(10.0 / 9).epsilon(1e-15));
  CHECK(exact_second_moment_Wn(m, 2) == doctest::Approx(32.0 / 27).epsilon(1e-15));
  // Direct enumeration at n = 1: E[Z_1²] / ρ².
  CHECK(exact_second_moment_Wn(m, 1) == doctest::Approx(((1.0 + 4.0) / 2.0) / 2.25).epsilon(1e-15));
  CHECK(limit_second_moment(m) == doctest::Approx(4.0 / 3).epsilon(1e-15));
  CHECK(std::abs(exact_second_moment_Wn(m, 100) - limit_second_moment(m)) < 1e-9);
  for (int n = 1; n < 60; ++n) CHECK(exact_second_moment_Wn(m, n) > exact_second_moment_Wn(m, n - 1));

  const Moments two{2.0, 4.0};
  for (int n = 0; n < 10; ++n) CHECK(exact_second_moment_Wn(two, n) == 1.0);
  CHECK(limit_second_moment(two) == 1.0);
  CHECK_THROWS_AS(limit_second_moment(Moments{1.0, 1.0}), ValidationError);

  for (int n = 0; n <= 20; ++n) {
    const double closed = std::pow(m.rho, 2 * n) * exact_second_moment_Wn(m, n);
    CHECK(second_moment_recursion(m, n) == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("generation sizes") {
  Rng rng(3);
  const auto two = sample_generation_sizes(OffspringDistribution::point_mass(2), 5, 1000, rng);
  CHECK(two.z == std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32});
  CHECK(two.w_n == 1.0);
  const auto one = sample_generation_sizes(OffspringDistribution::point_mass(1), 7, 1000, rng);
  CHECK(one.z == std::vector<std::uint64_t>(8, 1));
  CHECK(one.w_n == 1.0);

  try {
    sample_generation_sizes(OffspringDistribution::point_mass(2), 12, 1000, rng);
    FAIL("expected the cap to trip");
  } catch (const CapExceeded& e) {
    CHECK(e.generation() == 10);
    CHECK(e.last_completed() == 9);
    CHECK(e.population() == 1024);
  }

  // E[Z_n] = ρ^n, across both the direct and the multinomial regimes.
  const auto pi = brw::testing::half_one_two();
  for (int n : {3, 12, 20}) {
    std::vector<double> z;
    for (int r = 0; r < 100'000; ++r) {
      Rng s = Rng::stream(17, static_cast<std::uint64_t>(r));
      z.push_back(static_cast<double>(sample_generation_sizes(pi, n, kDirectDrawLimit * 1'000'000, s).z.back()));
    }
    CHECK(brw::testing::within_se(z, std::pow(1.5, n)));
  }
}

TEST_CASE("samplers follow their laws") {
  const auto pi = OffspringDistribution::create({{1, 0.2}, {3, 0.5}, {4, 0.3}});
  Rng rng(77);
  std::vector<double> counts(5, 0.0);
  for (int i = 0; i < 100'000; ++i) counts[static_cast<std::size_t>(pi.sample(rng))] += 1.0;
  CHECK(counts[0] == 0.0);
  CHECK(counts[2] == 0.0);
  const std::vector<double> obs = {counts[1], counts[3], counts[4]};
  const std::vector<double> exp = {0.2, 0.5, 0.3};
  CHECK(chi_square_gof(obs, exp).p_value > 1e-3);
}
