#include <atomic>
#include <numbers>
#include <stdexcept>

#include "brw/error.hpp"
#include "brw/experiments.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brw;

namespace {

ExperimentSetup setup(std::shared_ptr<const RadialAutomaton> aut, OffspringDistribution pi, int reps,
                      std::uint64_t seed, int threads = 1) {
  ExperimentSetup s;
  s.brw.automaton = std::move(aut);
  s.brw.offspring = std::move(pi);
  s.brw.replicates = reps;
  s.brw.seed = seed;
  s.threads = threads;
  return s;
}

bool agrees(const Statistic& s, double exact) {
  return std::abs(s.point - exact) <= 4.0 * s.std_error + 1e-12 * std::abs(exact);
}

}  // namespace

TEST_CASE("single-walk reductions match the exact walk") {
  const auto aut = brw::testing::s5_automaton();
  const auto cfg = setup(aut, OffspringDistribution::point_mass(1), 20'000, 5, 2);
  const std::vector<int> ns = {5, 12, 20};
  const auto ref = walk_reference(*aut, 512, 256);
  const auto runs = collect_snapshots(cfg, ns);

  const auto lln = lln_experiment(cfg, runs, ns);
  for (int n : ns) {
    const Statistic* s = lln.find("gap", n);
    REQUIRE(s != nullptr);
    CHECK(agrees(*s, single_walk::lln_gap(*aut, n)));
  }

  const auto clt = clt_experiment(cfg, runs, ns, ref.ell, ref.sigma);
  for (int n : ns) {
    const Statistic* s = clt.find("D", n);
    REQUIRE(s != nullptr);
    CHECK(agrees(*s, single_walk::expected_sup_distance(*aut, n, ref.ell, ref.sigma)));
  }

  const auto gap = chargap_experiment(cfg, runs, ns, {0.0, 1.0, 2.0}, ref.sigma);
  for (int n : ns) {
    for (double t : {1.0, 2.0}) {
      const Statistic* s = gap.find("gap", n, t);
      REQUIRE(s != nullptr);
      CHECK(agrees(*s, single_walk::chargap(*aut, n, t, ref.sigma)));
    }
    CHECK(gap.find("gap", n, 0.0)->point == 0.0);
  }
}

TEST_CASE("reflecting doubling has no gap") {
  const auto flip = brw::testing::make_automaton(3, {{"a", 1.0}});
  const auto cfg = setup(flip, OffspringDistribution::point_mass(2), 20, 1);
  const auto rep = lln_experiment(cfg, std::vector<int>{3, 6, 9});
  for (int n : {3, 6, 9}) CHECK(rep.find("gap", n)->point == 0.0);
}

TEST_CASE("maximal displacement guards") {
  const auto aut = brw::testing::s5_automaton();
  const auto cfg = setup(aut, brw::testing::half_one_two(), 500, 2);
  const auto rep = maxdisp_experiment(cfg, std::vector<int>{6, 10}, 1.0, {1.0, 2.5, 3.5});
  CHECK(rep.find("frequency", 10, 3.5)->point == 0.0);
  CHECK(rep.find("rate", 0, 2.5)->point == doctest::Approx(1.5 * exp_moment(aut->step(), 1.0) * std::exp(-2.5)));
  CHECK(rep.find("rate", 0, 2.5)->point < 1.0);
  bool warned = false;
  for (const auto& w : rep.warnings) warned = warned || w.find("a=1") != std::string::npos;
  CHECK(warned);
  for (const auto& v : rep.verdicts) CHECK(v.name.find("a=1 ") == std::string::npos);
  CHECK_THROWS_AS(maxdisp_experiment(cfg, std::vector<int>{6}, 1.0, {-1.0}), ValidationError);
}

TEST_CASE("experiments do not depend on the worker count") {
  const auto aut = brw::testing::s5_automaton();
  const std::vector<int> ns = {4, 8};
  const auto a = clt_experiment(setup(aut, brw::testing::half_one_two(), 40, 9, 1), ns, 1.16, 1.67);
  const auto b = clt_experiment(setup(aut, brw::testing::half_one_two(), 40, 9, 4), ns, 1.16, 1.67);
  REQUIRE(a.stats.size() == b.stats.size());
  for (std::size_t i = 0; i < a.stats.size(); ++i) {
    CHECK(a.stats[i].point == b.stats[i].point);
    CHECK(a.stats[i].std_error == b.stats[i].std_error);
  }
  CHECK(a.detail.rows == b.detail.rows);
}

TEST_CASE("martingale on deterministic doubling") {
  const auto rep = martingale_experiment(OffspringDistribution::point_mass(2), {1, 5}, 100, 1, 1'000'000);
  for (int n : {1, 5}) {
    CHECK(rep.find("W", n)->point == 1.0);
    CHECK(rep.find("W2", n)->point == 1.0);
  }
  CHECK(rep.passed());
}

TEST_CASE("experiment input validation") {
  const auto cfg = setup(brw::testing::s5_automaton(), brw::testing::half_one_two(), 3, 1);
  CHECK_THROWS_AS(lln_experiment(cfg, std::vector<int>{}), ValidationError);
  CHECK_THROWS_AS(lln_experiment(cfg, std::vector<int>{5, 5}), ValidationError);
  CHECK_THROWS_AS(clt_experiment(cfg, std::vector<int>{5}, 1.0, 0.0), DegenerateSigma);
  const auto grid = clt_grid();
  REQUIRE(grid.size() == 61);
  CHECK(grid.front() == -3.0);
  CHECK(grid.back() == 3.0);
  CHECK(grid[30] == 0.0);
}

TEST_CASE("statistics helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));

  CHECK(chi_square_sf(3.84145882069412, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_sf(0.0, 4) == 1.0);

  const std::vector<double> obs = {10, 20, 30, 40};
  const std::vector<double> probs = {0.1, 0.2, 0.3, 0.4};
  const auto exact = chi_square_gof(obs, probs);
  CHECK(exact.statistic == doctest::Approx(0.0));
  CHECK(exact.p_value == doctest::Approx(1.0));
  CHECK(exact.dof == 3);
  // Sparse tail cells are pooled until each holds five expected counts.
  const std::vector<double> sparse_obs = {50, 40, 4, 3, 3};
  const std::vector<double> sparse_p = {0.5, 0.4, 0.04, 0.03, 0.03};
  CHECK(chi_square_gof(sparse_obs, sparse_p).dof == 2);

  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);

  RunningStats rs;
  for (double x : {1.0, 2.0, 3.0, 4.0}) rs.add(x);
  CHECK(rs.mean() == 2.5);
  CHECK(rs.variance() == doctest::Approx(5.0 / 3));

  CompensatedSum cs;
  cs.add(1e16);
  for (int i = 0; i < 10; ++i) cs.add(1.0);
  cs.add(-1e16);
  CHECK(cs.value() == 10.0);

  // Jackknife of the standard deviation on a normal sample: standard error ≈ σ/√(2n).
  Rng rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 4000; ++i) {
    const double u1 = rng.uniform() + 1e-300, u2 = rng.uniform();
    xs.push_back(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2));
  }
  const auto jk = jackknife_std_dev(xs);
  CHECK(jk.point == doctest::Approx(1.0).epsilon(0.05));
  CHECK(jk.std_error == doctest::Approx(1.0 / std::sqrt(8000.0)).epsilon(0.2));
}

TEST_CASE("parallel_map keeps index order and reports the first failure") {
  for (int threads : {1, 2, 5}) {
    const auto out = parallel_map(100, threads, [](int i) { return i * i; });
    REQUIRE(out.size() == 100);
    for (int i = 0; i < 100; ++i) CHECK(out[static_cast<std::size_t>(i)] == i * i);
  }
  CHECK(parallel_map(0, 3, [](int i) { return i; }).empty());

  for (int threads : {1, 4}) {
    std::atomic<int> calls{0};
    try {
      parallel_map(200, threads, [&](int i) {
        ++calls;
        if (i == 17 || i == 150) throw std::runtime_error("fail " + std::to_string(i));
        return i;
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "fail 17");
    }
    if (threads == 1) CHECK(calls.load() == 18);
  }
}

TEST_CASE("random streams") {
  Rng a = Rng::stream(7, 0), b = Rng::stream(7, 0), c = Rng::stream(7, 1);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  Rng r(3);
  std::vector<double> counts(7, 0.0);
  for (int i = 0; i < 70'000; ++i) counts[r.below(7)] += 1;
  CHECK(chi_square_gof(counts, std::vector<double>(7, 1.0 / 7)).p_value > 1e-3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
