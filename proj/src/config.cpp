#include "brw/config.hpp"

#include <fstream>

#include "brw/error.hpp"

namespace brw {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const char* type_name(const json& j) { return j.type_name(); }

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, std::string("expected an integer, got ") + type_name(j));
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ValidationError(path, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) throw ValidationError(path, "must be a nonnegative 64-bit integer");
  throw ValidationError(path, std::string("expected a nonnegative integer, got ") + type_name(j));
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, std::string("expected a number, got ") + type_name(j));
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, std::string("expected true or false, got ") + type_name(j));
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, std::string("expected a string, got ") + type_name(j));
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, std::string("expected an array, got ") + type_name(j));
  return j;
}

const json& as_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, std::string("expected an object, got ") + type_name(j));
  return j;
}

std::vector<int> int_list(const json& j, const std::string& path) {
  std::vector<int> out;
  const auto& a = as_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_int(a[i], index(path, i)));
  return out;
}

std::vector<double> double_list(const json& j, const std::string& path) {
  std::vector<double> out;
  const auto& a = as_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_double(a[i], index(path, i)));
  return out;
}

// Walks the keys of an object, rejecting any the handler does not consume.
template <class Handler>
void each_key(const json& j, const std::string& path, Handler&& handle) {
  for (const auto& [key, value] : as_object(j, path).items()) {
    if (!handle(key, value, child(path, key))) throw ValidationError(child(path, key), "unknown key");
  }
}

const json& required(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ValidationError(child(path, key), "missing");
  return j.at(key);
}

std::vector<RawStepAtom> parse_step(const json& j) {
  std::vector<RawStepAtom> out;
  const auto& a = as_array(j, "step");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string path = index("step", i);
    as_object(a[i], path);
    RawStepAtom atom;
    const std::string word = as_string(required(a[i], "word", path), child(path, "word"));
    for (char c : word) {
      if (c < 'a' || c > 'z') throw ValidationError(child(path, "word"), std::string("invalid letter '") + c + "'");
      atom.letters.push_back(c - 'a');
    }
    atom.prob = as_double(required(a[i], "prob", path), child(path, "prob"));
    each_key(a[i], path, [](const std::string& k, const json&, const std::string&) { return k == "word" || k == "prob"; });
    out.push_back(std::move(atom));
  }
  return out;
}

std::vector<OffspringAtom> parse_offspring(const json& j) {
  std::vector<OffspringAtom> out;
  const auto& a = as_array(j, "offspring");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string path = index("offspring", i);
    as_object(a[i], path);
    OffspringAtom atom;
    atom.k = as_int(required(a[i], "k", path), child(path, "k"));
    atom.prob = as_double(required(a[i], "prob", path), child(path, "prob"));
    each_key(a[i], path, [](const std::string& k, const json&, const std::string&) { return k == "k" || k == "prob"; });
    out.push_back(atom);
  }
  return out;
}

void require_positive(int v, const std::string& path) {
  if (v < 1) throw ValidationError(path, "must be >= 1");
}

void require_increasing(const std::vector<int>& ns, const std::string& path) {
  if (ns.empty()) throw ValidationError(path, "must not be empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    require_positive(ns[i], index(path, i));
    if (i > 0 && ns[i] <= ns[i - 1]) throw ValidationError(index(path, i), "horizons must be strictly increasing");
  }
}

json step_json(const std::vector<RawStepAtom>& atoms) {
  json a = json::array();
  for (const auto& s : atoms) {
    std::string w;
    for (int l : s.letters) w += static_cast<char>('a' + l);
    a.push_back({{"word", w}, {"prob", s.prob}});
  }
  return a;
}

}  // namespace

void RunConfig::finalize() {
  space = TreeSpace::create(space.d);
  if (step_atoms.empty()) throw ValidationError("step", "missing or empty");
  if (offspring_atoms.empty()) throw ValidationError("offspring", "missing or empty");
  const StepDistribution sd = StepDistribution::create(space, step_atoms);
  offspring = std::make_shared<const OffspringDistribution>(OffspringDistribution::create(offspring_atoms));

  require_increasing(horizons, "horizons");
  require_increasing(walk_horizons, "experiments.walk.horizons");
  require_increasing(lln_horizons, "experiments.lln.horizons");
  require_increasing(martingale_horizons, "experiments.martingale.horizons");
  require_increasing(maxdisp_horizons, "experiments.maxdisp.horizons");
  require_positive(mixed_n, "experiments.mixed.n");
  require_positive(spine_horizon, "experiments.spine.horizon");
  if (calibration_n < 1 || calibration_n > 3) throw ValidationError("experiments.spine.calibration_n", "must lie in [1, 3]");
  if (oracle_max_depth < 0 || oracle_max_depth > 4) throw ValidationError("experiments.oracle.max_depth", "must lie in [0, 4]");
  if (maxdisp_a.empty()) throw ValidationError("experiments.maxdisp.a", "must not be empty");
  for (std::size_t i = 0; i < maxdisp_a.size(); ++i)
    if (!(maxdisp_a[i] > 0.0)) throw ValidationError(index("experiments.maxdisp.a", i), "must be positive");
  if (chargap_t.empty()) throw ValidationError("experiments.chargap.t", "must not be empty");

  const std::pair<const char*, int> counts[] = {
      {"brw", replicates.brw},         {"walk", replicates.walk},       {"lln", replicates.lln},
      {"mixed", replicates.mixed},     {"clt", replicates.clt},         {"chargap", replicates.chargap},
      {"maxdisp", replicates.maxdisp}, {"martingale", replicates.martingale}, {"spine", replicates.spine}};
  for (const auto& [name, v] : counts) require_positive(v, std::string("replicates.") + name);

  if (cap < 1) throw ValidationError("cap", "must be >= 1");
  if (n_ell < 2) throw ValidationError("n_ell", "must be >= 2");
  if (n_sigma < 2) throw ValidationError("n_sigma", "must be >= 2");
  if (out.empty()) throw ValidationError("out", "must not be empty");
  if (!(thresholds.clt_d_max > 0.0)) throw ValidationError("thresholds.clt_d_max", "must be positive");
  if (!(thresholds.lln_median_rel > 0.0)) throw ValidationError("thresholds.lln_median_rel", "must be positive");
  if (!(thresholds.oracle_residual > 0.0)) throw ValidationError("thresholds.oracle_residual", "must be positive");
  if (!(thresholds.calibration_z > 0.0)) throw ValidationError("thresholds.calibration_z", "must be positive");

  automaton = std::make_shared<const RadialAutomaton>(build_radial_automaton(space, sd));
}

BrwRunConfig RunConfig::brw_config(int reps, int horizon) const {
  if (!automaton || !offspring) throw ValidationError("config", "not finalized");
  BrwRunConfig c;
  c.automaton = automaton;
  c.offspring = *offspring;
  c.horizon = horizon;
  c.cap = cap;
  c.seed = seed;
  c.replicates = reps;
  c.full_word = full_word;
  return c;
}

json RunConfig::to_json() const {
  json off = json::array();
  for (const auto& a : offspring_atoms) off.push_back({{"k", a.k}, {"prob", a.prob}});
  return {
      {"d", space.d},
      {"step", step_json(step_atoms)},
      {"offspring", off},
      {"horizons", horizons},
      {"cap", cap},
      {"seed", seed},
      {"n_ell", n_ell},
      {"n_sigma", n_sigma},
      {"out", out},
      {"full_word", full_word},
      {"replicates",
       {{"brw", replicates.brw},
        {"walk", replicates.walk},
        {"lln", replicates.lln},
        {"mixed", replicates.mixed},
        {"clt", replicates.clt},
        {"chargap", replicates.chargap},
        {"maxdisp", replicates.maxdisp},
        {"martingale", replicates.martingale},
        {"spine", replicates.spine}}},
      {"thresholds",
       {{"clt_d_max", thresholds.clt_d_max},
        {"lln_median_rel", thresholds.lln_median_rel},
        {"oracle_residual", thresholds.oracle_residual},
        {"calibration_z", thresholds.calibration_z}}},
      {"experiments",
       {{"walk", {{"horizons", walk_horizons}}},
        {"lln", {{"horizons", lln_horizons}}},
        {"mixed", {{"n", mixed_n}}},
        {"martingale", {{"horizons", martingale_horizons}}},
        {"maxdisp", {{"horizons", maxdisp_horizons}, {"t", maxdisp_t}, {"a", maxdisp_a}}},
        {"chargap", {{"t", chargap_t}}},
        {"spine", {{"horizon", spine_horizon}, {"calibration_n", calibration_n}}},
        {"oracle", {{"max_depth", oracle_max_depth}}}}},
  };
}

std::vector<std::string> preset_names() { return {"paper-s5", "srw-t3"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.space.d = 3;
  c.offspring_atoms = {{1, 0.5}, {2, 0.5}};
  if (name == "paper-s5") {
    c.step_atoms = {{{0}, 0.1}, {{1}, 0.2}, {{2}, 0.1}, {{0, 1}, 0.15}, {{0, 1, 2}, 0.15}, {{0, 2}, 0.3}};
  } else if (name == "srw-t3") {
    c.step_atoms = {{{0}, 1.0 / 3.0}, {{1}, 1.0 / 3.0}, {{2}, 1.0 / 3.0}};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  c.finalize();
  return c;
}

RunConfig parse_config(const json& j, RunConfig c) {
  each_key(j, "", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "preset") {
      as_string(v, path);  // consumed by load_config
    } else if (key == "d") {
      c.space.d = as_int(v, path);
    } else if (key == "step") {
      c.step_atoms = parse_step(v);
    } else if (key == "offspring") {
      c.offspring_atoms = parse_offspring(v);
    } else if (key == "horizons") {
      c.horizons = int_list(v, path);
    } else if (key == "cap") {
      c.cap = as_u64(v, path);
    } else if (key == "seed") {
      c.seed = as_u64(v, path);
    } else if (key == "n_ell") {
      c.n_ell = as_int(v, path);
    } else if (key == "n_sigma") {
      c.n_sigma = as_int(v, path);
    } else if (key == "out") {
      c.out = as_string(v, path);
    } else if (key == "full_word") {
      c.full_word = as_bool(v, path);
    } else if (key == "replicates") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        int* slot = k == "brw"          ? &c.replicates.brw
                    : k == "walk"       ? &c.replicates.walk
                    : k == "lln"        ? &c.replicates.lln
                    : k == "mixed"      ? &c.replicates.mixed
                    : k == "clt"        ? &c.replicates.clt
                    : k == "chargap"    ? &c.replicates.chargap
                    : k == "maxdisp"    ? &c.replicates.maxdisp
                    : k == "martingale" ? &c.replicates.martingale
                    : k == "spine"      ? &c.replicates.spine
                                        : nullptr;
        if (!slot) return false;
        *slot = as_int(x, p);
        return true;
      });
    } else if (key == "thresholds") {
      each_key(v, path, [&](const std::string& k, const json& x, const std::string& p) {
        double* slot = k == "clt_d_max"         ? &c.thresholds.clt_d_max
                       : k == "lln_median_rel"  ? &c.thresholds.lln_median_rel
                       : k == "oracle_residual" ? &c.thresholds.oracle_residual
                       : k == "calibration_z"   ? &c.thresholds.calibration_z
                                                : nullptr;
        if (!slot) return false;
        *slot = as_double(x, p);
        return true;
      });
    } else if (key == "experiments") {
      each_key(v, path, [&](const std::string& name, const json& e, const std::string& ep) {
        auto field = [&](std::initializer_list<const char*> allowed) {
          each_key(e, ep, [&](const std::string& k, const json&, const std::string&) {
            for (const char* a : allowed)
              if (k == a) return true;
            return false;
          });
        };
        auto at = [&](const char* k) -> const json* { return e.contains(k) ? &e.at(k) : nullptr; };
        if (name == "walk") {
          field({"horizons"});
          if (auto* x = at("horizons")) c.walk_horizons = int_list(*x, child(ep, "horizons"));
        } else if (name == "lln") {
          field({"horizons"});
          if (auto* x = at("horizons")) c.lln_horizons = int_list(*x, child(ep, "horizons"));
        } else if (name == "mixed") {
          field({"n"});
          if (auto* x = at("n")) c.mixed_n = as_int(*x, child(ep, "n"));
        } else if (name == "martingale") {
          field({"horizons"});
          if (auto* x = at("horizons")) c.martingale_horizons = int_list(*x, child(ep, "horizons"));
        } else if (name == "maxdisp") {
          field({"horizons", "t", "a"});
          if (auto* x = at("horizons")) c.maxdisp_horizons = int_list(*x, child(ep, "horizons"));
          if (auto* x = at("t")) c.maxdisp_t = as_double(*x, child(ep, "t"));
          if (auto* x = at("a")) c.maxdisp_a = double_list(*x, child(ep, "a"));
        } else if (name == "chargap") {
          field({"t"});
          if (auto* x = at("t")) c.chargap_t = double_list(*x, child(ep, "t"));
        } else if (name == "spine") {
          field({"horizon", "calibration_n"});
          if (auto* x = at("horizon")) c.spine_horizon = as_int(*x, child(ep, "horizon"));
          if (auto* x = at("calibration_n")) c.calibration_n = as_int(*x, child(ep, "calibration_n"));
        } else if (name == "oracle") {
          field({"max_depth"});
          if (auto* x = at("max_depth")) c.oracle_max_depth = as_int(*x, child(ep, "max_depth"));
        } else {
          return false;
        }
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  c.finalize();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", path.string() + ": " + e.what());
  }
  as_object(j, "config");
  RunConfig base;
  if (j.contains("preset")) {
    base = preset(as_string(j.at("preset"), "preset"));
  } else {
    for (const char* k : {"d", "step", "offspring"}) required(j, k, "");
  }
  return parse_config(j, std::move(base));
}

}  // namespace brw
