#include "brw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "brw/error.hpp"
#include "brw/parallel.hpp"
#include "brw/radial_dp.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"

namespace brw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string join(const std::vector<int>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) s += (i ? " " : "") + std::to_string(ns[i]);
  return s;
}

void check_horizons(const std::vector<int>& ns) {
  if (ns.empty()) throw ValidationError("horizons", "at least one horizon is required");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw ValidationError("horizons[" + std::to_string(i) + "]", "must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw ValidationError("horizons", "must be strictly increasing");
  }
}

void check_runs(const ReplicateSnapshots& runs, const std::vector<int>& ns) {
  check_horizons(ns);
  if (runs.empty()) throw ValidationError("replicates", "no replicate snapshots");
  for (const auto& r : runs) {
    if (r.size() != ns.size()) throw ValidationError("snapshots", "snapshot count does not match the horizons");
    for (std::size_t j = 0; j < ns.size(); ++j)
      if (r[j].n != ns[j]) throw ValidationError("snapshots", "snapshot generation does not match the horizons");
  }
}

std::vector<double> exact_speeds(const RadialAutomaton& aut, int n_max) {
  RadialDp dp(aut);
  const auto m = dp.moments(n_max);
  std::vector<double> ell(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) ell[static_cast<std::size_t>(n)] = m[static_cast<std::size_t>(n)].mean / n;
  return ell;
}

Statistic summarize(std::string name, int n, double param, const RunningStats& s, double reference = kNaN) {
  return {std::move(name), n, param, s.mean(), s.std_error(), static_cast<int>(s.count()), reference};
}

void add_common(ExperimentReport& rep, const ExperimentSetup& setup, const std::vector<int>& ns) {
  rep.parameters.emplace_back("seed", std::to_string(setup.brw.seed));
  rep.parameters.emplace_back("replicates", std::to_string(setup.brw.replicates));
  rep.parameters.emplace_back("cap", std::to_string(setup.brw.cap));
  rep.parameters.emplace_back("horizons", join(ns));
}

// Rescaled-cdf sanity checks that must hold on every replicate.
void check_cdf(const GenerationSnapshot& snap, const std::vector<double>& cdf, double total) {
  for (std::size_t i = 1; i < cdf.size(); ++i)
    if (cdf[i] < cdf[i - 1]) throw std::logic_error("rescaled cdf decreased at generation " + std::to_string(snap.n));
  if (total != snap.w) throw std::logic_error("rescaled cdf total differs from W_n at generation " + std::to_string(snap.n));
}

}  // namespace

ReplicateSnapshots collect_snapshots(const ExperimentSetup& setup, const std::vector<int>& ns) {
  check_horizons(ns);
  BrwRunConfig cfg = setup.brw;
  cfg.horizon = ns.back();
  cfg.validate();
  return parallel_map(cfg.replicates, setup.threads, [&](int r) {
    auto all = run_brw(cfg, r);
    std::vector<GenerationSnapshot> keep;
    keep.reserve(ns.size());
    for (int n : ns) keep.push_back(std::move(all[static_cast<std::size_t>(n)]));
    return keep;
  });
}

const Statistic* ExperimentReport::find(const std::string& name, int n, double param) const noexcept {
  for (const auto& s : stats)
    if (s.name == name && s.n == n && s.param == param) return &s;
  return nullptr;
}

WalkReference walk_reference(const RadialAutomaton& automaton, int n_ell, int n_sigma) {
  const SpeedReference sr = reference_speed(automaton, n_ell);
  const SigmaEstimate se = estimate_sigma(automaton, sr.ell, n_sigma);
  return {sr.ell, sr.bias, n_ell, se.point, n_sigma};
}

ExperimentReport lln_experiment(const ExperimentSetup& setup, const std::vector<int>& ns, double median_threshold) {
  return lln_experiment(setup, collect_snapshots(setup, ns), ns, median_threshold);
}

ExperimentReport lln_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                const std::vector<int>& ns, double median_threshold) {
  check_runs(runs, ns);
  const auto ell = exact_speeds(*setup.brw.automaton, ns.back());
  ExperimentReport rep;
  rep.id = "lln";
  add_common(rep, setup, ns);
  rep.parameters.emplace_back("median_threshold", fmt(median_threshold));
  rep.detail.columns = {"replicate", "n", "W_n", "L_n", "ell_n_W_n"};

  std::vector<double> gaps;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const int n = ns[j];
    const double ln = ell[static_cast<std::size_t>(n)];
    RunningStats gap;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& s = runs[r][j];
      const double dev = s.l - ln * s.w;
      gap.add(dev * dev);
      rep.detail.rows.push_back({static_cast<double>(r), static_cast<double>(n), s.w, s.l, ln * s.w});
    }
    rep.stats.push_back(summarize("gap", n, 0.0, gap));
    rep.stats.push_back({"ell_n", n, 0.0, ln, 0.0, 0, ln});
    gaps.push_back(gap.mean());
  }

  bool decreasing = true;
  for (std::size_t j = 1; j < gaps.size(); ++j) decreasing = decreasing && gaps[j] < gaps[j - 1];
  std::string trend;
  for (double g : gaps) trend += (trend.empty() ? "" : " > ") + fmt(g);
  rep.verdicts.push_back({"gap strictly decreasing", decreasing, trend});

  const int last = ns.back();
  const double ln = ell[static_cast<std::size_t>(last)];
  std::vector<double> rel;
  for (const auto& run : runs) rel.push_back(std::abs(run.back().l / run.back().w - ln) / ln);
  const double med = median(rel);
  rep.stats.push_back({"median_rel_dev", last, 0.0, med, 0.0, static_cast<int>(rel.size()), kNaN});
  rep.verdicts.push_back({"median |L_n/W_n - ell_n|/ell_n < threshold at n=" + std::to_string(last),
                          med < median_threshold, fmt(med) + " vs " + fmt(median_threshold)});
  return rep;
}

ExperimentReport mixed_moment_experiment(const ExperimentSetup& setup, int n) {
  const auto runs = collect_snapshots(setup, {n});
  const double ln = exact_speeds(*setup.brw.automaton, n)[static_cast<std::size_t>(n)];
  const double w2 = exact_second_moment_Wn(moments(setup.brw.offspring).moments, n);
  ExperimentReport rep;
  rep.id = "mixed";
  add_common(rep, setup, {n});
  RunningStats lw;
  for (const auto& run : runs) lw.add(run[0].l * run[0].w);
  const double ref = ln * w2;
  rep.stats.push_back(summarize("L_n_W_n", n, 0.0, lw, ref));
  const double z = lw.std_error() > 0.0 ? std::abs(lw.mean() - ref) / lw.std_error() : 0.0;
  rep.verdicts.push_back({"mean L_n W_n within 4 SE of ell_n E[W_n^2]", std::abs(lw.mean() - ref) <= 4.0 * lw.std_error() + 1e-12 * std::abs(ref),
                          fmt(lw.mean()) + " vs " + fmt(ref) + " (z=" + fmt(z) + ")"});
  return rep;
}

std::vector<double> clt_grid() {
  std::vector<double> xs;
  for (int i = -30; i <= 30; ++i) xs.push_back(i / 10.0);
  return xs;
}

ExperimentReport clt_experiment(const ExperimentSetup& setup, const std::vector<int>& ns, double ell, double sigma,
                                double d_threshold) {
  if (!(sigma > kSigmaDegenerateBelow)) throw DegenerateSigma("clt experiment refuses sigma = " + fmt(sigma));
  return clt_experiment(setup, collect_snapshots(setup, ns), ns, ell, sigma, d_threshold);
}

ExperimentReport clt_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                const std::vector<int>& ns, double ell, double sigma, double d_threshold) {
  if (!(sigma > kSigmaDegenerateBelow)) throw DegenerateSigma("clt experiment refuses sigma = " + fmt(sigma));
  check_runs(runs, ns);
  const auto xs = clt_grid();
  std::vector<double> phi;
  for (double x : xs) phi.push_back(normal_cdf(x));
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> spots = {-1.0, 0.0, 1.0};

  ExperimentReport rep;
  rep.id = "clt";
  add_common(rep, setup, ns);
  rep.parameters.emplace_back("ell", fmt(ell));
  rep.parameters.emplace_back("sigma", fmt(sigma));
  rep.parameters.emplace_back("d_threshold", fmt(d_threshold));
  rep.detail.columns = {"replicate", "n", "W_n", "D_n"};

  std::vector<double> means;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const int n = ns[j];
    RunningStats d;
    std::vector<RunningStats> spot(spots.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& s = runs[r][j];
      const auto cdf = rescaled_cdf(s, ell, sigma, xs);
      check_cdf(s, cdf, rescaled_cdf(s, ell, sigma, std::span<const double>(&inf, 1))[0]);
      double sup = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) sup = std::max(sup, std::abs(cdf[i] / s.w - phi[i]));
      d.add(sup);
      for (std::size_t k = 0; k < spots.size(); ++k) spot[k].add(cdf[static_cast<std::size_t>(30 + 10 * spots[k])] / s.w);
      rep.detail.rows.push_back({static_cast<double>(r), static_cast<double>(n), s.w, sup});
    }
    rep.stats.push_back(summarize("D", n, 0.0, d));
    for (std::size_t k = 0; k < spots.size(); ++k)
      rep.stats.push_back(summarize("cdf_over_W", n, spots[k], spot[k], normal_cdf(spots[k])));
    means.push_back(d.mean());
  }
  const int first = ns.front(), last = ns.back();
  rep.verdicts.push_back({"D_" + std::to_string(last) + " < D_" + std::to_string(first), means.back() < means.front(),
                          fmt(means.back()) + " vs " + fmt(means.front())});
  rep.verdicts.push_back({"D_" + std::to_string(last) + " < threshold", means.back() < d_threshold,
                          fmt(means.back()) + " vs " + fmt(d_threshold) + " (engineering calibration)"});
  return rep;
}

ExperimentReport chargap_experiment(const ExperimentSetup& setup, const std::vector<int>& ns,
                                    const std::vector<double>& ts, double sigma) {
  if (!(sigma > kSigmaDegenerateBelow)) throw DegenerateSigma("chargap experiment refuses sigma = " + fmt(sigma));
  return chargap_experiment(setup, collect_snapshots(setup, ns), ns, ts, sigma);
}

ExperimentReport chargap_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                    const std::vector<int>& ns, const std::vector<double>& ts, double sigma) {
  if (!(sigma > kSigmaDegenerateBelow)) throw DegenerateSigma("chargap experiment refuses sigma = " + fmt(sigma));
  if (ts.empty()) throw ValidationError("ts", "at least one t is required");
  check_runs(runs, ns);
  const auto laws = exact_radial_laws(*setup.brw.automaton, ns.back());

  ExperimentReport rep;
  rep.id = "chargap";
  add_common(rep, setup, ns);
  rep.parameters.emplace_back("sigma", fmt(sigma));

  for (double t : ts) {
    std::vector<double> gaps;
    bool zero = true;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const int n = ns[j];
      const double tn = t / (sigma * std::sqrt(static_cast<double>(n)));
      // The law is rescaled to unit mass so that φ_n(0) is exactly 1.
      const RadialLaw& law = laws[static_cast<std::size_t>(n)];
      std::complex<double> phi = char_fn(law, tn) / law.total();
      RunningStats gap;
      for (const auto& run : runs) {
        const auto& s = run[j];
        std::complex<double> psi{0.0, 0.0};
        for (std::size_t k = 0; k < s.hist.size(); ++k)
          if (s.hist[k]) psi += static_cast<double>(s.hist[k]) * std::polar(1.0, tn * static_cast<double>(k));
        psi /= s.rho_n;
        if (std::abs(psi) > s.w * (1.0 + 1e-12)) throw std::logic_error("|Psi_n| exceeds W_n");
        const double g = std::norm(psi - s.w * phi);
        zero = zero && g == 0.0;
        gap.add(g);
      }
      rep.stats.push_back(summarize("gap", n, t, gap));
      gaps.push_back(gap.mean());
    }
    if (t == 0.0) {
      rep.verdicts.push_back({"t=0 gap exactly zero", zero, zero ? "all replicates 0" : "nonzero gap at t=0"});
    } else {
      const int first = ns.front(), last = ns.back();
      rep.verdicts.push_back({"t=" + fmt(t) + " gap_" + std::to_string(last) + " < gap_" + std::to_string(first),
                              gaps.back() < gaps.front(), fmt(gaps.back()) + " vs " + fmt(gaps.front())});
    }
  }
  return rep;
}

ExperimentReport maxdisp_experiment(const ExperimentSetup& setup, const std::vector<int>& ns, double t,
                                    const std::vector<double>& as) {
  return maxdisp_experiment(setup, collect_snapshots(setup, ns), ns, t, as);
}

ExperimentReport maxdisp_experiment(const ExperimentSetup& setup, const ReplicateSnapshots& runs,
                                    const std::vector<int>& ns, double t, const std::vector<double>& as) {
  if (as.empty()) throw ValidationError("a", "at least one level a is required");
  for (double a : as)
    if (!(a > 0.0)) throw ValidationError("a", "levels must be positive");
  check_runs(runs, ns);
  const RadialAutomaton& aut = *setup.brw.automaton;
  const double rho = moments(setup.brw.offspring).moments.rho;
  const double theta1 = exp_moment(aut.step(), t);

  ExperimentReport rep;
  rep.id = "maxdisp";
  add_common(rep, setup, ns);
  rep.parameters.emplace_back("t", fmt(t));
  rep.parameters.emplace_back("theta_1", fmt(theta1));

  for (double a : as) {
    const double rate = rho * theta1 * std::exp(-t * a);
    const bool vacuous = rate >= 1.0;
    if (vacuous) rep.warnings.push_back("a=" + fmt(a) + ": rate " + fmt(rate) + " >= 1, bound is vacuous");
    rep.stats.push_back({"rate", 0, a, rate, 0.0, 0, rate});
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const int n = ns[j];
      std::uint64_t hits = 0;
      for (const auto& run : runs)
        if (run[j].max_dist >= n * a) ++hits;
      const double R = static_cast<double>(runs.size());
      const double p = static_cast<double>(hits) / R;
      const double se = std::sqrt(p * (1.0 - p) / R);
      const double bound = std::pow(rate, n);
      rep.stats.push_back({"frequency", n, a, p, se, static_cast<int>(runs.size()), bound});
      if (!vacuous)
        rep.verdicts.push_back({"a=" + fmt(a) + " n=" + std::to_string(n) + " frequency <= bound + 3 SE",
                                p <= bound + 3.0 * se, fmt(p) + " vs " + fmt(bound)});
      if (a > aut.horizon())
        rep.verdicts.push_back({"a=" + fmt(a) + " n=" + std::to_string(n) + " beyond step length: frequency 0",
                                hits == 0, std::to_string(hits) + " hits"});
    }
  }
  return rep;
}

ExperimentReport martingale_experiment(const OffspringDistribution& pi, const std::vector<int>& ns, int replicates,
                                       std::uint64_t seed, std::uint64_t cap, int threads) {
  check_horizons(ns);
  if (replicates < 2) throw ValidationError("replicates", "need at least two replicates");
  const Moments m = moments(pi).moments;
  const auto runs = parallel_map(replicates, threads, [&](int r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    return sample_generation_sizes(pi, ns.back(), cap, rng).z;
  });
  ExperimentReport rep;
  rep.id = "martingale";
  rep.parameters.emplace_back("seed", std::to_string(seed));
  rep.parameters.emplace_back("replicates", std::to_string(replicates));
  rep.parameters.emplace_back("horizons", join(ns));
  for (int n : ns) {
    const double rho_n = std::pow(m.rho, n);
    RunningStats w, w2;
    for (const auto& z : runs) {
      const double wn = static_cast<double>(z[static_cast<std::size_t>(n)]) / rho_n;
      w.add(wn);
      w2.add(wn * wn);
    }
    const double ref2 = exact_second_moment_Wn(m, n);
    rep.stats.push_back(summarize("W", n, 0.0, w, 1.0));
    rep.stats.push_back(summarize("W2", n, 0.0, w2, ref2));
    auto within = [](const RunningStats& s, double ref) {
      return std::abs(s.mean() - ref) <= 4.0 * s.std_error() + 1e-12 * std::abs(ref);
    };
    rep.verdicts.push_back({"n=" + std::to_string(n) + " mean W_n within 4 SE of 1", within(w, 1.0),
                            fmt(w.mean()) + " +- " + fmt(w.std_error())});
    rep.verdicts.push_back({"n=" + std::to_string(n) + " mean W_n^2 within 4 SE of closed form", within(w2, ref2),
                            fmt(w2.mean()) + " +- " + fmt(w2.std_error()) + " vs " + fmt(ref2)});
  }
  return rep;
}

namespace single_walk {

double lln_gap(const RadialAutomaton& automaton, int n) {
  const RadialLaw law = exact_radial_law(automaton, n);
  return law.variance() / (static_cast<double>(n) * n);
}

double expected_sup_distance(const RadialAutomaton& automaton, int n, double ell, double sigma) {
  const RadialLaw law = exact_radial_law(automaton, n);
  const auto xs = clt_grid();
  const double centre = n * ell;
  const double scale = sigma * std::sqrt(static_cast<double>(n));
  double e = 0.0;
  for (std::size_t k = 0; k < law.masses.size(); ++k) {
    if (law.masses[k] == 0.0) continue;
    double sup = 0.0;
    for (double x : xs) {
      const double step = static_cast<double>(k) <= centre + x * scale ? 1.0 : 0.0;
      sup = std::max(sup, std::abs(step - normal_cdf(x)));
    }
    e += law.masses[k] * sup;
  }
  return e;
}

double chargap(const RadialAutomaton& automaton, int n, double t, double sigma) {
  const RadialLaw law = exact_radial_law(automaton, n);
  const double tn = t / (sigma * std::sqrt(static_cast<double>(n)));
  return 1.0 - std::norm(char_fn(law, tn) / law.total());
}

}  // namespace single_walk

}  // namespace brw
