// Command-line front end: loads a configuration, runs one experiment family
// and writes CSV files plus a manifest into the output directory.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "brw/config.hpp"
#include "brw/error.hpp"
#include "brw/experiments.hpp"
#include "brw/oracle.hpp"
#include "brw/output.hpp"
#include "brw/parallel.hpp"
#include "brw/radial_dp.hpp"
#include "brw/spine.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace brw;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit : int { kPass = 0, kVerdictFailure = 1, kUsageError = 2, kResourceError = 3 };

struct Options {
  std::string config;
  std::string preset = "paper-s5";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  int threads = 1;
  std::optional<std::string> out;
  std::optional<int> max_depth;
  std::optional<int> horizon;
};

struct Context {
  RunConfig cfg;
  fs::path dir;
  int threads = 1;
  std::optional<int> replicates;
  json references = json::object();
  std::vector<std::string> outputs;
  bool pass = true;

  int reps(int configured) const { return replicates.value_or(configured); }

  ExperimentSetup setup(int configured_reps, int horizon) const {
    return {cfg.brw_config(reps(configured_reps), horizon), threads};
  }

  const WalkReference& reference() {
    if (!ref) {
      ref = walk_reference(*cfg.automaton, cfg.n_ell, cfg.n_sigma);
      references = {{"ell", ref->ell}, {"ell_bias", ref->ell_bias}, {"n_ell", ref->n_ell},
                    {"sigma", ref->sigma}, {"n_sigma", ref->n_sigma}};
    }
    return *ref;
  }

  void emit(const ExperimentReport& r) {
    write_report(dir, r);
    outputs.push_back(r.id + ".csv");
    if (!r.detail.rows.empty()) outputs.push_back(r.id + "_detail.csv");
    outputs.push_back(r.id + "_summary.txt");
    std::cout << summary_text(r) << '\n';
    pass = pass && r.passed();
  }

 private:
  std::optional<WalkReference> ref;
};

std::string g17(double x) { return format_cell(Cell{x}); }

// ---------------------------------------------------------------- walk

void run_walk(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const RadialAutomaton& aut = *cfg.automaton;
  const auto& ns = cfg.walk_horizons;
  const int n_max = ns.back();
  const WalkReference& ref = ctx.reference();

  RadialDp dp(aut);
  const auto mom = dp.moments(n_max);
  const RadialLaw last_law = exact_radial_law(aut, n_max);

  const int walkers = ctx.reps(cfg.replicates.walk);
  const auto finals = parallel_map(walkers, ctx.threads, [&](int i) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
    const auto path = sample_walk(aut, n_max, rng);
    std::vector<int> at;
    for (int n : ns) at.push_back(path[static_cast<std::size_t>(n)]);
    return at;
  });

  ExperimentReport rep;
  rep.id = "walk_check";
  rep.parameters = {{"seed", std::to_string(cfg.seed)}, {"walkers", std::to_string(walkers)},
                    {"ell_ref", g17(ref.ell)}, {"ell_bias", g17(ref.ell_bias)}, {"n_ell", std::to_string(ref.n_ell)},
                    {"sigma_ref", g17(ref.sigma)}, {"n_sigma", std::to_string(ref.n_sigma)}};

  CsvWriter csv(ctx.dir / "walk.csv",
                {"n", "mean_distance", "speed_estimate", "sigma_estimate", "method", "std_error", "replicates"});
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const int n = ns[j];
    const auto& m = mom[static_cast<std::size_t>(n)];
    const double var = std::max(0.0, m.second - m.mean * m.mean);
    csv.row({std::int64_t{n}, m.mean, m.mean / n, std::sqrt(var / n), to_string(EstimateMethod::ExactDp), 0.0,
             std::int64_t{0}});
    RunningStats d;
    std::vector<double> z;
    for (const auto& f : finals) {
      d.add(f[j]);
      z.push_back((f[j] - n * ref.ell) / std::sqrt(static_cast<double>(n)));
    }
    const double sig = walkers >= 3 ? jackknife_std_dev(z).point : 0.0;
    csv.row({std::int64_t{n}, d.mean(), d.mean() / n, sig, to_string(EstimateMethod::MonteCarlo), d.std_error(),
             std::int64_t{walkers}});
    rep.stats.push_back({"mean_distance", n, 0.0, d.mean(), d.std_error(), walkers, m.mean});
    rep.verdicts.push_back({"n=" + std::to_string(n) + " Monte Carlo mean within 4 SE of exact",
                            std::abs(d.mean() - m.mean) <= 4.0 * d.std_error() + 1e-12,
                            g17(d.mean()) + " vs " + g17(m.mean)});
  }
  ctx.outputs.push_back("walk.csv");
  rep.verdicts.push_back({"exact law of |Y_" + std::to_string(n_max) + "| sums to 1 within 1e-10",
                          std::abs(last_law.total() - 1.0) < 1e-10, g17(last_law.total())});
  ctx.emit(rep);
}

// ---------------------------------------------------------------- brw

void run_brw_cmd(Context& ctx, std::optional<int> horizon_opt) {
  const RunConfig& cfg = ctx.cfg;
  const int horizon = horizon_opt.value_or(cfg.horizons.back());
  const int reps = ctx.reps(cfg.replicates.brw);
  BrwRunConfig bc = cfg.brw_config(reps, horizon);
  bc.validate();
  const auto runs = parallel_map(reps, ctx.threads, [&](int r) { return run_brw(bc, r); });

  CsvWriter traj(ctx.dir / "brw.csv", {"replicate", "n", "Z_n", "W_n", "H_n", "L_n", "Max_n"});
  CsvWriter hist(ctx.dir / "brw_hist.csv", {"replicate", "n", "distance", "count"});
  bool conserved = true, bounded = true;
  const double rho = moments(*cfg.offspring).moments.rho;
  for (int r = 0; r < reps; ++r) {
    for (const auto& s : runs[static_cast<std::size_t>(r)]) {
      traj.row({std::int64_t{r}, std::int64_t{s.n}, static_cast<std::int64_t>(s.z), s.w, s.h, s.l,
                std::int64_t{s.max_dist}});
      std::uint64_t total = 0;
      for (std::size_t k = 0; k < s.hist.size(); ++k) {
        total += s.hist[k];
        if (s.hist[k])
          hist.row({std::int64_t{r}, std::int64_t{s.n}, static_cast<std::int64_t>(k),
                    static_cast<std::int64_t>(s.hist[k])});
      }
      conserved = conserved && total == s.z && s.w == static_cast<double>(s.z) / std::pow(rho, s.n);
      bounded = bounded && s.max_dist <= s.n * cfg.automaton->horizon();
    }
  }
  ctx.outputs.insert(ctx.outputs.end(), {"brw.csv", "brw_hist.csv"});

  ExperimentReport rep;
  rep.id = "brw_check";
  rep.parameters = {{"seed", std::to_string(cfg.seed)}, {"replicates", std::to_string(reps)},
                    {"horizon", std::to_string(horizon)}, {"full_word", cfg.full_word ? "true" : "false"}};
  rep.verdicts.push_back({"histogram sums to Z_n and W_n = Z_n / rho^n", conserved, ""});
  rep.verdicts.push_back({"Max_n <= n L", bounded, ""});
  ctx.emit(rep);
}

// ---------------------------------------------------------------- martingale

void run_martingale(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ctx.emit(martingale_experiment(*cfg.offspring, cfg.martingale_horizons, ctx.reps(cfg.replicates.martingale),
                                 cfg.seed, cfg.cap, ctx.threads));
}

// ---------------------------------------------------------------- spine

void run_spine(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const RadialAutomaton& aut = *cfg.automaton;
  const OffspringDistribution& pi = *cfg.offspring;
  const Moments m = moments(pi).moments;
  const int n = cfg.spine_horizon;
  const int runs_n = ctx.reps(cfg.replicates.spine);
  const auto runs = sample_two_spines(aut, pi, n, runs_n, cfg.seed, ctx.threads);

  CsvWriter csv(ctx.dir / "spine.csv", {"run", "tau", "d1", "d2", "weight", "post1", "post2"});
  bool weights_exact = true;
  std::vector<double> tau_counts(static_cast<std::size_t>(n) + 1, 0.0);
  const RadialLaw law = exact_radial_law(aut, n);
  std::vector<double> d1_counts(law.masses.size(), 0.0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    csv.row({static_cast<std::int64_t>(i), std::int64_t{r.tau}, std::int64_t{r.d1}, std::int64_t{r.d2}, r.weight,
             std::int64_t{r.post1}, std::int64_t{r.post2}});
    weights_exact = weights_exact && r.weight == skeleton_weight(m, n, r.tau);
    tau_counts[r.tau == kNotSplit ? static_cast<std::size_t>(n) : static_cast<std::size_t>(r.tau)] += 1.0;
    d1_counts[static_cast<std::size_t>(r.d1)] += 1.0;
  }
  ctx.outputs.push_back("spine.csv");

  ExperimentReport rep;
  rep.id = "spine_check";
  rep.parameters = {{"seed", std::to_string(cfg.seed)}, {"runs", std::to_string(runs_n)},
                    {"horizon", std::to_string(n)}, {"child_choice", "uniform, independent per mark"},
                    {"stay_probability", g17(stay_probability(pi))}};
  rep.verdicts.push_back({"weights equal skeleton_weight bit for bit", weights_exact, ""});
  const auto tau_fit = chi_square_gof(tau_counts, tau_law(pi, n));
  rep.stats.push_back({"tau_chi2_p", n, 0.0, tau_fit.p_value, 0.0, runs_n, std::nan("")});
  rep.verdicts.push_back({"tau law matches geometric form (p > 0.001)", tau_fit.p_value > 0.001,
                          "chi2=" + g17(tau_fit.statistic) + " dof=" + std::to_string(tau_fit.dof)});
  const auto d1_fit = chi_square_gof(d1_counts, law.masses);
  rep.stats.push_back({"d1_chi2_p", n, 0.0, d1_fit.p_value, 0.0, runs_n, std::nan("")});
  rep.verdicts.push_back({"spine marginal matches exact law of |Y_n| (p > 0.001)", d1_fit.p_value > 0.001,
                          "chi2=" + g17(d1_fit.statistic) + " dof=" + std::to_string(d1_fit.dof)});

  const TauSeries series = tau_series_estimate(runs, m, n);
  rep.stats.push_back({"tau_series", n, 0.0, series.estimate, 0.0, runs_n, tau_series_exact(pi)});
  rep.stats.push_back({"tau_series_tail", n, 0.0, series.tail, 0.0, runs_n, std::nan("")});

  const CalibrationReport cal = calibrate_normalization(aut, pi, cfg.calibration_n, runs_n, cfg.seed,
                                                        cfg.thresholds.calibration_z, ctx.threads);
  CsvWriter ccsv(ctx.dir / "calibration.csv",
                 {"n", "exact_EZ2", "brute_force_EZ2", "spine_mean", "spine_se", "ratio", "ratio_se", "spine_exact",
                  "per_parent_mean", "per_parent_ratio", "per_parent_ratio_se"});
  for (const auto& r : cal.rows)
    ccsv.row({std::int64_t{r.n}, r.exact, r.brute_force, r.spine_mean, r.spine_se, r.ratio, r.ratio_se,
              r.spine_exact, r.per_parent_mean, r.per_parent_ratio, r.per_parent_ratio_se});
  ctx.outputs.push_back("calibration.csv");

  std::ofstream txt(ctx.dir / "calibration.txt", std::ios::binary | std::ios::trunc);
  txt << "calibration of the two-spine weight against E[Z_n^2]\n";
  txt << "child choice: uniform and independent for each mark\n";
  txt << "runs per n: " << cal.runs << "\n";
  txt << "reference 1 + (theta - rho^2)/(rho(rho - 1)) = E[W^2]: " << g17(cal.limit_ew2) << "\n";
  txt << "series (theta/rho)^2 sum_k P(tau=k)(theta/rho^2)^k under the exact tau law: " << g17(cal.series_exact)
      << "\n";
  txt << "series / E[W^2]: " << g17(cal.series_exact / cal.limit_ew2) << "\n";
  for (const auto& r : cal.rows) {
    txt << "n=" << r.n << "  E[Z_n^2] exact " << g17(r.exact) << "  enumerated " << g17(r.brute_force)
        << "  spine mean " << g17(r.spine_mean) << " +- " << g17(r.spine_se) << "  measured constant "
        << g17(r.ratio) << " +- " << g17(r.ratio_se) << "  (exact " << g17(r.spine_exact / r.exact)
        << ")  per-parent constant " << g17(r.per_parent_ratio) << " +- " << g17(r.per_parent_ratio_se) << "\n";
  }
  txt << "ratio constant across n: " << (cal.ratio_constant ? "yes" : "no") << " (max pairwise z "
      << g17(cal.max_ratio_z) << ")\n";
  ctx.outputs.push_back("calibration.txt");

  for (const auto& r : cal.rows) {
    rep.stats.push_back({"calibration_ratio", r.n, 0.0, r.ratio, r.ratio_se, cal.runs, r.spine_exact / r.exact});
    rep.stats.push_back({"per_parent_ratio", r.n, 0.0, r.per_parent_ratio, r.per_parent_ratio_se, cal.runs, 1.0});
  }
  rep.stats.push_back({"limit_EW2", 0, 0.0, cal.limit_ew2, 0.0, 0, cal.limit_ew2});
  rep.verdicts.push_back({"calibration ratio constant in n", cal.ratio_constant,
                          "max pairwise z " + g17(cal.max_ratio_z)});
  ctx.emit(rep);
}

// ---------------------------------------------------------------- oracle

void run_oracle(Context& ctx, std::optional<int> depth_opt) {
  const RunConfig& cfg = ctx.cfg;
  const int depth = depth_opt.value_or(cfg.oracle_max_depth);
  if (depth < 0 || depth > 4) throw ValidationError("max-depth", "must lie in [0, 4]");
  std::vector<IdentityCheck> checks;
  for (int n = 0; n <= depth; ++n) {
    auto battery = verify_many_to_one(*cfg.offspring, *cfg.automaton, n, cfg.thresholds.oracle_residual);
    checks.insert(checks.end(), battery.begin(), battery.end());
    checks.push_back(verify_second_moment(*cfg.offspring, *cfg.automaton, n, cfg.thresholds.oracle_residual));
  }
  write_identity_checks(ctx.dir / "oracle.csv", checks);
  ctx.outputs.push_back("oracle.csv");

  std::ofstream txt(ctx.dir / "oracle_summary.txt", std::ios::binary | std::ios::trunc);
  bool all = true;
  for (const auto& c : checks) {
    char line[512];
    std::snprintf(line, sizeof line, "%-4s %-28s %-40s lhs=%-22.17g rhs=%-22.17g residual=%.3g\n",
                  c.pass ? "PASS" : "FAIL", c.identity.c_str(), c.parameters.c_str(), c.lhs, c.rhs, c.residual);
    txt << line;
    std::cout << line;
    all = all && c.pass;
  }
  ctx.outputs.push_back("oracle_summary.txt");
  ctx.pass = ctx.pass && all;
}

// ---------------------------------------------------------------- experiments

void run_lln(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ctx.emit(lln_experiment(ctx.setup(cfg.replicates.lln, cfg.lln_horizons.back()), cfg.lln_horizons,
                          cfg.thresholds.lln_median_rel));
  ctx.emit(mixed_moment_experiment(ctx.setup(cfg.replicates.mixed, cfg.mixed_n), cfg.mixed_n));
}

void run_clt(Context& ctx, const ReplicateSnapshots* shared = nullptr) {
  const RunConfig& cfg = ctx.cfg;
  const WalkReference& ref = ctx.reference();
  const auto setup = ctx.setup(cfg.replicates.clt, cfg.horizons.back());
  ctx.emit(shared ? clt_experiment(setup, *shared, cfg.horizons, ref.ell, ref.sigma, cfg.thresholds.clt_d_max)
                  : clt_experiment(setup, cfg.horizons, ref.ell, ref.sigma, cfg.thresholds.clt_d_max));
}

void run_chargap(Context& ctx, const ReplicateSnapshots* shared = nullptr) {
  const RunConfig& cfg = ctx.cfg;
  const WalkReference& ref = ctx.reference();
  const auto setup = ctx.setup(cfg.replicates.chargap, cfg.horizons.back());
  ctx.emit(shared ? chargap_experiment(setup, *shared, cfg.horizons, cfg.chargap_t, ref.sigma)
                  : chargap_experiment(setup, cfg.horizons, cfg.chargap_t, ref.sigma));
}

void run_maxdisp(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ctx.emit(maxdisp_experiment(ctx.setup(cfg.replicates.maxdisp, cfg.maxdisp_horizons.back()), cfg.maxdisp_horizons,
                              cfg.maxdisp_t, cfg.maxdisp_a));
}

void run_report(Context& ctx, const Options& opt) {
  run_walk(ctx);
  run_oracle(ctx, opt.max_depth);
  run_martingale(ctx);
  run_brw_cmd(ctx, opt.horizon);
  run_spine(ctx);
  run_lln(ctx);
  const RunConfig& cfg = ctx.cfg;
  if (ctx.reps(cfg.replicates.clt) == ctx.reps(cfg.replicates.chargap)) {
    const auto runs = collect_snapshots(ctx.setup(cfg.replicates.clt, cfg.horizons.back()), cfg.horizons);
    run_clt(ctx, &runs);
    run_chargap(ctx, &runs);
  } else {
    run_clt(ctx);
    run_chargap(ctx);
  }
  run_maxdisp(ctx);
}

RunConfig resolve_config(const Options& opt) {
  RunConfig cfg = opt.config.empty() ? preset(opt.preset) : load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.out) cfg.out = *opt.out;
  cfg.finalize();
  return cfg;
}

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << "error[" << kind << "]: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching random walks on homogeneous trees: simulation and limit-theorem checks", "brwsim"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options opt;
  auto* config_opt = app.add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--preset", opt.preset, "bundled configuration (paper-s5, srw-t3)")->excludes(config_opt);
  app.add_option("--seed", opt.seed, "master seed (nonnegative 64-bit integer)");
  app.add_option("--replicates", opt.replicates, "replicate count for the selected experiment")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "worker threads; never changes the output")->check(CLI::PositiveNumber);
  app.add_option("--out", opt.out, "output directory");

  const std::map<std::string, std::string> commands = {
      {"walk", "speed and sigma of the underlying walk, exact and Monte Carlo"},
      {"brw", "per-generation snapshots of branching runs"},
      {"martingale", "moments of W_n from generation sizes"},
      {"spine", "two-spine runs, tau law and normalization calibration"},
      {"oracle", "exact many-to-one and second-moment identities"},
      {"lln", "mean-square gap of L_n against ell_n W_n, and the mixed moment"},
      {"clt", "sup distance of the rescaled empirical distribution to the normal law"},
      {"chargap", "characteristic-function gap"},
      {"maxdisp", "maximal displacement against the exponential bound"},
      {"report", "every experiment above"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);
  subs["oracle"]->add_option("--max-depth", opt.max_depth, "largest enumerated generation (<= 4)");
  subs["report"]->add_option("--max-depth", opt.max_depth, "largest enumerated generation (<= 4)");
  subs["brw"]->add_option("--horizon", opt.horizon, "generations to simulate")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const auto start = std::chrono::steady_clock::now();
  std::string which;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) which = name;

  try {
    Context ctx;
    ctx.cfg = resolve_config(opt);
    ctx.dir = ctx.cfg.out;
    ctx.threads = opt.threads;
    ctx.replicates = opt.replicates;
    fs::create_directories(ctx.dir);

    if (which == "walk") run_walk(ctx);
    else if (which == "brw") run_brw_cmd(ctx, opt.horizon);
    else if (which == "martingale") run_martingale(ctx);
    else if (which == "spine") run_spine(ctx);
    else if (which == "oracle") run_oracle(ctx, opt.max_depth);
    else if (which == "lln") run_lln(ctx);
    else if (which == "clt") run_clt(ctx);
    else if (which == "chargap") run_chargap(ctx);
    else if (which == "maxdisp") run_maxdisp(ctx);
    else run_report(ctx, opt);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json argv_json = json::array();
    for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);
    write_manifest(ctx.dir, {{"tool", "brwsim"},
                             {"version", kVersion},
                             {"subcommand", which},
                             {"argv", argv_json},
                             {"config", ctx.cfg.to_json()},
                             {"preset", ctx.cfg.preset},
                             {"seed", ctx.cfg.seed},
                             {"replicates_override", opt.replicates ? json(*opt.replicates) : json(nullptr)},
                             {"threads", ctx.threads},
                             {"stream_rule",
                              "replicate r uses xoshiro256** seeded by four SplitMix64 outputs from state "
                              "seed XOR splitmix64(r + 1)"},
                             {"references", ctx.references},
                             {"outputs", ctx.outputs},
                             {"verdicts_pass", ctx.pass},
                             {"compiler", __VERSION__},
                             {"wall_seconds", wall}});
    std::cout << (ctx.pass ? "all verdicts passed" : "some verdicts failed") << " (" << ctx.dir.string() << ")\n";
    return ctx.pass ? kPass : kVerdictFailure;
  } catch (const ValidationError& e) {
    return fail("config", e.what(), kUsageError);
  } catch (const DegenerateSigma& e) {
    return fail("degenerate", e.what(), kUsageError);
  } catch (const CapExceeded& e) {
    return fail("cap", std::string(e.what()) + "; last completed generation " + std::to_string(e.last_completed()),
                kResourceError);
  } catch (const BudgetExceeded& e) {
    return fail("budget", e.what(), kResourceError);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kVerdictFailure);
  }
}
