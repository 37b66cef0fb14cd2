#include "brw/error.hpp"
#include "brw/spine.hpp"
#include "brw/stats.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brw;

TEST_CASE("skeleton weight examples") {
  const Moments m{1.5, 2.5};
  CHECK(skeleton_weight(m, 3, 1) == doctest::Approx(250.0 * std::pow(1.5, 6) / 81.0).epsilon(1e-14));
  CHECK(skeleton_weight(m, 3, 1) == doctest::Approx(35.15625).epsilon(1e-14));
  CHECK(skeleton_weight(Moments{2.0, 4.0}, 5, kNotSplit) == 1024.0);
  for (int n = 1; n <= 12; ++n)
    for (int k = 0; k < n; ++k)
      CHECK(skeleton_weight(m, n, k) == doctest::Approx(skeleton_weight_factored(m, n, k)).epsilon(1e-13));
  CHECK_THROWS_AS(skeleton_weight(m, 3, 3), ValidationError);
  CHECK_THROWS_AS(skeleton_weight(m, 0, kNotSplit), ValidationError);
}

TEST_CASE("run weights match the closed form bit for bit") {
  const auto pi = brw::testing::half_one_two();
  const Moments m = moments(pi).moments;
  for (int n : {1, 3, 10}) {
    for (const auto& r : sample_two_spines(*brw::testing::s5_automaton(), pi, n, 5000, 12)) {
      REQUIRE(r.weight == skeleton_weight(m, n, r.tau));
      CHECK(r.n == n);
      CHECK(r.d1 <= 3 * n);
      CHECK(r.d2 <= 3 * n);
      if (r.tau == kNotSplit) {
        CHECK(r.d1 == r.d2);
        CHECK(r.post1 == 0);
      } else {
        CHECK(r.post1 <= 3 * (n - r.tau));
      }
    }
  }
}

TEST_CASE("single-child branching never splits") {
  for (const auto& r :
       sample_two_spines(*brw::testing::s5_automaton(), OffspringDistribution::point_mass(1), 8, 200, 3)) {
    CHECK(r.tau == kNotSplit);
    CHECK(r.d1 == r.d2);
    CHECK(r.weight == 1.0);
  }
}

TEST_CASE("tau law") {
  const auto pi = brw::testing::half_one_two();
  CHECK(stay_probability(pi) == doctest::Approx(0.6).epsilon(1e-15));
  const auto law = tau_law(pi, 10);
  double total = 0.0;
  for (double p : law) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(law[0] == doctest::Approx(0.4));
  CHECK(law[3] == doctest::Approx(0.4 * 0.6 * 0.6 * 0.6));
  CHECK(law.back() == doctest::Approx(std::pow(0.6, 10)));

  const int n = 20;
  const auto runs = sample_two_spines(*brw::testing::s5_automaton(), pi, n, 100'000, 5);
  std::vector<double> counts(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& r : runs) counts[r.tau == kNotSplit ? static_cast<std::size_t>(n) : static_cast<std::size_t>(r.tau)] += 1;
  CHECK(chi_square_gof(counts, tau_law(pi, n)).p_value > 1e-3);
}

TEST_CASE("spine marginals follow the walk") {
  const auto aut = brw::testing::s5_automaton();
  const auto pi = brw::testing::half_one_two();
  const int n = 10;
  const auto runs = sample_two_spines(*aut, pi, n, 100'000, 21);

  const auto law = exact_radial_law(*aut, n);
  std::vector<double> d1(law.masses.size(), 0.0);
  for (const auto& r : runs) d1[static_cast<std::size_t>(r.d1)] += 1;
  CHECK(chi_square_gof(d1, law.masses).p_value > 1e-3);

  // Given τ = k, the post-split displacements are exchangeable and each
  // follows |Y_{n−k}|.
  const auto laws = exact_radial_laws(*aut, n);
  for (int k : {5, 7}) {
    const auto& target = laws[static_cast<std::size_t>(n - k)];
    std::vector<double> p1(target.masses.size(), 0.0), p2(target.masses.size(), 0.0);
    for (const auto& r : runs) {
      if (r.tau != k) continue;
      p1[static_cast<std::size_t>(r.post1)] += 1;
      p2[static_cast<std::size_t>(r.post2)] += 1;
    }
    CHECK(chi_square_two_sample(p1, p2).p_value > 1e-3);
    CHECK(chi_square_gof(p1, target.masses).p_value > 1e-3);
  }
}

TEST_CASE("tau series") {
  const auto pi = brw::testing::half_one_two();
  const Moments m = moments(pi).moments;
  CHECK(tau_series_exact(pi) == doctest::Approx(10.0 / 3).epsilon(1e-14));
  CHECK(tau_series_exact(pi) / limit_second_moment(m) == doctest::Approx(m.theta).epsilon(1e-14));
  CHECK(tau_series_exact(OffspringDistribution::point_mass(2)) == doctest::Approx(4.0).epsilon(1e-14));

  const auto runs = sample_two_spines(*brw::testing::s5_automaton(), pi, 40, 100'000, 8);
  const auto s40 = tau_series_estimate(runs, m, 40);
  CHECK(std::abs(s40.estimate - 10.0 / 3) < 0.05);
  CHECK(s40.tail < 1e-3);

  const auto s0 = tau_series_estimate(runs, m, 0);
  double p0 = 0.0;
  for (const auto& r : runs) p0 += r.tau == 0 ? 1.0 : 0.0;
  CHECK(s0.estimate == doctest::Approx((m.theta / m.rho) * (m.theta / m.rho) * p0 / runs.size()));
  CHECK_THROWS_AS(tau_series_estimate(runs, m, 41), ValidationError);

  // Tail decay: P̂(τ ≥ n)(θ/ρ²)^n falls along n = 5, 10, 20, 40.
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {5, 10, 20, 40}) {
    double beyond = 0.0;
    for (const auto& r : runs) beyond += (r.tau == kNotSplit || r.tau >= n) ? 1.0 : 0.0;
    const double t = beyond / runs.size() * std::pow(m.theta / (m.rho * m.rho), n);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("calibration against the exact second moments") {
  const auto aut = brw::testing::s5_automaton();
  const auto rep = calibrate_normalization(*aut, OffspringDistribution::point_mass(2), 3, 2000, 1);
  for (const auto& row : rep.rows) {
    CHECK(row.exact == doctest::Approx(std::pow(4.0, row.n)));
    CHECK(row.brute_force == doctest::Approx(row.exact).epsilon(1e-12));
  }

  const auto half = calibrate_normalization(*aut, brw::testing::half_one_two(), 3, 50'000, 1);
  REQUIRE(half.rows.size() == 3);
  CHECK(half.rows[1].exact == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(half.limit_ew2 == doctest::Approx(4.0 / 3));
  for (const auto& row : half.rows) {
    CHECK(row.brute_force == doctest::Approx(row.exact).epsilon(1e-12));
    CHECK(std::abs(row.spine_mean - row.spine_exact) <= 4.0 * row.spine_se);
    CHECK(std::abs(row.per_parent_ratio - 1.0) <= 4.0 * row.per_parent_ratio_se + 1e-12);
  }
  CHECK_THROWS_AS(calibrate_normalization(*aut, brw::testing::half_one_two(), 4, 10, 1), ValidationError);
}

TEST_CASE("spine sampling is independent of the worker count") {
  const auto pi = brw::testing::half_one_two();
  const auto a = sample_two_spines(*brw::testing::s5_automaton(), pi, 12, 3000, 4, 1);
  const auto b = sample_two_spines(*brw::testing::s5_automaton(), pi, 12, 3000, 4, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tau == b[i].tau);
    CHECK(a[i].d1 == b[i].d1);
    CHECK(a[i].d2 == b[i].d2);
    CHECK(a[i].weight == b[i].weight);
  }
}
