#include "brw/spine.hpp"

#include <cmath>
#include <limits>

#include "brw/error.hpp"
#include "brw/oracle.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"

namespace brw {

namespace {

struct SpineLaws {
  OffspringDistribution first;   // π^{(1)}
  OffspringDistribution second;  // π^{(2)}
  Moments m;
};

SpineLaws spine_laws(const OffspringDistribution& pi) {
  return {size_biased(pi, 1), size_biased(pi, 2), moments(pi).moments};
}

void check_split(int n, int k) {
  if (n < 1) throw ValidationError("n", "skeleton horizon must be >= 1");
  if (k != kNotSplit && (k < 0 || k >= n))
    throw ValidationError("k", "split generation must lie in [0, n) or be the not-split marker");
}

SpineRun run_one(const RadialAutomaton& aut, const SpineLaws& laws, int n, Rng& rng) {
  SpineRun run;
  run.n = n;
  // `shared` is the first spine's word, `apart` the second's once the marks
  // separate; tail1/tail2 hold the steps taken after the split, so their
  // lengths are the distances from the split vertex.
  WordStack shared, apart, tail1, tail2;
  bool together = true;
  for (int gen = 1; gen <= n; ++gen) {
    if (together) {
      const auto k = static_cast<std::uint64_t>(laws.second.sample(rng));
      const std::uint64_t c1 = rng.below(k);
      const std::uint64_t c2 = rng.below(k);
      if (c1 == c2) {
        run.weight *= laws.m.theta;
        shared.apply(aut.atom(aut.sample_atom(rng)));
        continue;
      }
      together = false;
      run.tau = gen - 1;
      run.weight *= laws.m.theta;
      run.weight *= laws.m.theta;
      apart = shared;
    } else {
      // Each spine's own family size; positions do not depend on it.
      (void)laws.first.sample(rng);
      (void)laws.first.sample(rng);
      run.weight *= laws.m.rho;
      run.weight *= laws.m.rho;
    }
    const auto g1 = aut.atom(aut.sample_atom(rng));
    shared.apply(g1);
    tail1.apply(g1);
    const auto g2 = aut.atom(aut.sample_atom(rng));
    apart.apply(g2);
    tail2.apply(g2);
  }
  run.d1 = static_cast<int>(shared.size());
  run.d2 = together ? run.d1 : static_cast<int>(apart.size());
  run.post1 = static_cast<int>(tail1.size());
  run.post2 = static_cast<int>(tail2.size());
  return run;
}

}  // namespace

double skeleton_weight(const Moments& m, int n, int k) {
  check_split(n, k);
  double w = 1.0;
  for (int gen = 1; gen <= n; ++gen) {
    if (k == kNotSplit || gen <= k) {
      w *= m.theta;
    } else if (gen == k + 1) {
      w *= m.theta;
      w *= m.theta;
    } else {
      w *= m.rho;
      w *= m.rho;
    }
  }
  return w;
}

double skeleton_weight_factored(const Moments& m, int n, int k) {
  check_split(n, k);
  if (k == kNotSplit) return std::pow(m.theta, n);
  const double r = m.theta / m.rho;
  return std::pow(m.rho, 2 * n) * r * r * std::pow(m.theta / (m.rho * m.rho), k);
}

SpineRun sample_two_spine(const RadialAutomaton& automaton, const OffspringDistribution& pi, int n, Rng& rng) {
  if (n < 1) throw ValidationError("n", "spine horizon must be >= 1");
  return run_one(automaton, spine_laws(pi), n, rng);
}

std::vector<SpineRun> sample_two_spines(const RadialAutomaton& automaton, const OffspringDistribution& pi, int n,
                                        int runs, std::uint64_t seed, int threads) {
  if (n < 1) throw ValidationError("n", "spine horizon must be >= 1");
  if (runs < 1) throw ValidationError("runs", "must be >= 1");
  const SpineLaws laws = spine_laws(pi);
  return parallel_map(runs, threads, [&](int i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    return run_one(automaton, laws, n, rng);
  });
}

double stay_probability(const OffspringDistribution& pi) {
  const OffspringDistribution second = size_biased(pi, 2);
  double s = 0.0;
  for (const auto& a : second.atoms()) s += a.prob / a.k;
  return s;
}

std::vector<double> tau_law(const OffspringDistribution& pi, int n) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  const double s = stay_probability(pi);
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  double stay = 1.0;
  for (int k = 0; k < n; ++k) {
    p[static_cast<std::size_t>(k)] = stay * (1.0 - s);
    stay *= s;
  }
  p.back() = stay;
  return p;
}

TauSeries tau_series_estimate(const std::vector<SpineRun>& runs, const Moments& m, int truncation) {
  if (runs.empty()) throw ValidationError("runs", "no spine runs");
  if (truncation < 0 || truncation > runs.front().n)
    throw ValidationError("truncation", "must lie in [0, horizon of the runs]");
  std::vector<double> freq(static_cast<std::size_t>(truncation) + 1, 0.0);
  double beyond = 0.0;
  for (const auto& r : runs) {
    if (r.tau != kNotSplit && r.tau <= truncation)
      freq[static_cast<std::size_t>(r.tau)] += 1.0;
    else
      beyond += 1.0;
  }
  const double total = static_cast<double>(runs.size());
  const double lead = (m.theta / m.rho) * (m.theta / m.rho);
  const double ratio = m.theta / (m.rho * m.rho);
  TauSeries s;
  s.truncation = truncation;
  s.runs = static_cast<int>(runs.size());
  double power = 1.0;
  CompensatedSum sum;
  for (int k = 0; k <= truncation; ++k) {
    sum.add(freq[static_cast<std::size_t>(k)] / total * power);
    power *= ratio;
  }
  s.estimate = lead * sum.value();
  s.tail = lead * beyond / total * power;
  return s;
}

double tau_series_exact(const OffspringDistribution& pi) {
  const Moments m = moments(pi).moments;
  const double s = stay_probability(pi);
  if (s >= 1.0) return 0.0;  // the marks never separate
  const double q = s * m.theta / (m.rho * m.rho);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  const double lead = (m.theta / m.rho) * (m.theta / m.rho);
  return lead * (1.0 - s) / (1.0 - q);
}

CalibrationReport calibrate_normalization(const RadialAutomaton& automaton, const OffspringDistribution& pi,
                                          int max_n, int runs, std::uint64_t seed, double z, int threads) {
  if (max_n < 1 || max_n > 3) throw ValidationError("small_n", "calibration horizon must lie in [1, 3]");
  if (runs < 2) throw ValidationError("runs", "need at least two spine runs");
  const Moments m = moments(pi).moments;
  CalibrationReport rep;
  rep.runs = runs;
  rep.limit_ew2 = m.rho > 1.0 ? limit_second_moment(m) : std::numeric_limits<double>::quiet_NaN();
  rep.series_exact = tau_series_exact(pi);

  for (int n = 1; n <= max_n; ++n) {
    CalibrationRow row;
    row.n = n;
    row.exact = second_moment_recursion(m, n);
    row.brute_force = exact_pair_functional(pi, automaton, n, [](int, int) { return 1.0; });

    const auto sample = sample_two_spines(automaton, pi, n, runs, seed ^ (0x9E3779B97F4A7C15ULL * n), threads);
    RunningStats full, per_parent;
    for (const auto& r : sample) {
      full.add(r.weight);
      per_parent.add(r.tau == kNotSplit ? r.weight : r.weight / m.theta);
    }
    row.spine_mean = full.mean();
    row.spine_se = full.std_error();
    row.ratio = row.spine_mean / row.exact;
    row.ratio_se = row.spine_se / row.exact;
    row.per_parent_mean = per_parent.mean();
    row.per_parent_ratio = per_parent.mean() / row.exact;
    row.per_parent_ratio_se = per_parent.std_error() / row.exact;

    const auto law = tau_law(pi, n);
    for (int k = 0; k < n; ++k) row.spine_exact += law[static_cast<std::size_t>(k)] * skeleton_weight(m, n, k);
    row.spine_exact += law.back() * skeleton_weight(m, n, kNotSplit);
    rep.rows.push_back(row);
  }

  rep.ratio_constant = true;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.rows.size(); ++j) {
      const auto& a = rep.rows[i];
      const auto& b = rep.rows[j];
      const double se = std::hypot(a.ratio_se, b.ratio_se);
      const double gap = std::abs(a.ratio - b.ratio);
      const double zz = se > 0.0 ? gap / se : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      rep.max_ratio_z = std::max(rep.max_ratio_z, zz);
      if (!(zz < z)) rep.ratio_constant = false;
    }
  }
  return rep;
}

}  // namespace brw
