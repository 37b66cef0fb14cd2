#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "brw/automaton.hpp"
#include "brw/branching.hpp"
#include "brw/population.hpp"

namespace brw {

struct ReplicateCounts {
  int brw = 1;
  int walk = 100'000;
  int lln = 500;
  int mixed = 10'000;
  int clt = 200;
  int chargap = 200;
  int maxdisp = 10'000;
  int martingale = 100'000;
  int spine = 100'000;
};

struct Thresholds {
  double clt_d_max = 0.10;
  double lln_median_rel = 0.10;
  double oracle_residual = 1e-10;
  double calibration_z = 4.0;
};

struct RunConfig {
  std::string preset;  // name of the preset this config started from, if any
  TreeSpace space;
  std::vector<RawStepAtom> step_atoms;
  std::vector<OffspringAtom> offspring_atoms;
  std::vector<int> horizons = {9, 15, 36};
  ReplicateCounts replicates;
  std::uint64_t cap = kDefaultParticleCap;
  std::uint64_t seed = 1;
  int n_ell = 2048;
  int n_sigma = 512;
  std::string out = "out";
  bool full_word = false;
  Thresholds thresholds;

  std::vector<int> walk_horizons = {1, 2, 5, 10, 20, 50, 100, 200};
  std::vector<int> lln_horizons = {10, 20, 30};
  int mixed_n = 10;
  std::vector<int> martingale_horizons = {1, 2, 10, 20};
  std::vector<int> maxdisp_horizons = {10, 20};
  double maxdisp_t = 1.0;
  std::vector<double> maxdisp_a = {2.5, 3.5};
  std::vector<double> chargap_t = {0.0, 0.5, 1.0, 2.0};
  int spine_horizon = 10;
  int calibration_n = 3;
  int oracle_max_depth = 3;

  // Compiled from the fields above by finalize().
  std::shared_ptr<const RadialAutomaton> automaton;
  std::shared_ptr<const OffspringDistribution> offspring;

  /// Validates every field and builds the automaton. Throws ValidationError
  /// with a field path.
  void finalize();

  /// Branching run settings for an experiment with the given replicate count.
  BrwRunConfig brw_config(int replicates, int horizon) const;

  nlohmann::json to_json() const;
};

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// "paper-s5": T_3 with μ(a)=0.1, μ(b)=0.2, μ(c)=0.1, μ(ab)=0.15, μ(abc)=0.15,
/// μ(ac)=0.3 and π = ½δ1 + ½δ2. "srw-t3": uniform nearest-neighbour steps on T_3
/// with the same π. Throws ValidationError for an unknown name.
RunConfig preset(const std::string& name);

/// Fields present in `j` override `base`. Unknown keys are errors.
RunConfig parse_config(const nlohmann::json& j, RunConfig base = {});

/// Reads a JSON file. A top-level "preset" key selects the base; otherwise
/// "d", "step" and "offspring" are required.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace brw
