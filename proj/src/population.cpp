#include "brw/population.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "brw/error.hpp"

namespace brw {

namespace {

// A particle keeps its distance and the top letters of its reduced word. The
// top letter is stored plainly; each letter below is coded by its rank among
// the d − 1 letters that differ from the letter above it, so a code needs
// bit_width(d − 2) bits. Letters pushed past the 128-bit window are dropped;
// validate() guarantees no step reads that deep before the horizon.
class PackedLane {
 public:
  struct Particle {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::uint32_t dist = 0;
    Letter top = 0;
  };

  explicit PackedLane(int d)
      : bits_(static_cast<int>(std::bit_width(static_cast<unsigned>(d - 2)))), mask_((1u << bits_) - 1u) {}

  static std::uint32_t dist(const Particle& p) noexcept { return p.dist; }

  void apply(Particle& p, std::span<const Letter> g) const noexcept {
    std::size_t i = 0;
    while (i < g.size() && p.dist > 0 && p.top == g[i]) {
      pop(p);
      ++i;
    }
    for (; i < g.size(); ++i) push(p, g[i]);
  }

 private:
  using Wide = __uint128_t;

  static Wide load(const Particle& p) noexcept { return (static_cast<Wide>(p.hi) << 64) | p.lo; }
  static void store(Particle& p, Wide w) noexcept {
    p.lo = static_cast<std::uint64_t>(w);
    p.hi = static_cast<std::uint64_t>(w >> 64);
  }

  void pop(Particle& p) const noexcept {
    if (--p.dist == 0) return;
    Wide rest = load(p);
    const auto code = static_cast<unsigned>(rest) & mask_;
    p.top = static_cast<Letter>(code < p.top ? code : code + 1);
    store(p, rest >> bits_);
  }

  void push(Particle& p, Letter g) const noexcept {
    if (p.dist > 0) {
      const unsigned code = p.top < g ? p.top : p.top - 1u;
      store(p, (load(p) << bits_) | code);
    }
    p.top = g;
    ++p.dist;
  }

  int bits_;
  unsigned mask_;
};

class FullWordLane {
 public:
  using Particle = WordStack;

  explicit FullWordLane(int) {}

  static std::uint32_t dist(const Particle& p) noexcept { return static_cast<std::uint32_t>(p.size()); }
  static void apply(Particle& p, std::span<const Letter> g) { p.apply(g); }
};

GenerationSnapshot make_snapshot(int n, double rho, std::span<const std::uint32_t> dists) {
  GenerationSnapshot s;
  s.n = n;
  s.z = dists.size();
  s.rho_n = std::pow(rho, n);
  s.w = static_cast<double>(s.z) / s.rho_n;
  std::uint32_t top = 0;
  for (auto d : dists) top = std::max(top, d);
  s.hist.assign(static_cast<std::size_t>(top) + 1, 0);
  std::uint64_t total = 0;
  for (auto d : dists) {
    ++s.hist[d];
    total += d;
  }
  s.max_dist = static_cast<int>(top);
  s.h = static_cast<double>(total) / s.rho_n;
  s.l = n > 0 ? s.h / n : 0.0;
  return s;
}

template <class Lane>
std::vector<GenerationSnapshot> evolve(const BrwRunConfig& cfg, int replicate) {
  const RadialAutomaton& aut = *cfg.automaton;
  const Lane lane(aut.space().d);
  const double rho = moments(cfg.offspring).moments.rho;
  Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(replicate));

  std::vector<typename Lane::Particle> cur(1), next;
  std::vector<std::uint32_t> counts, dists{0};
  std::vector<GenerationSnapshot> out;
  out.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
  out.push_back(make_snapshot(0, rho, dists));

  for (int gen = 1; gen <= cfg.horizon; ++gen) {
    counts.resize(cur.size());
    std::uint64_t total = 0;
    for (auto& c : counts) {
      c = static_cast<std::uint32_t>(cfg.offspring.sample(rng));
      total += c;
    }
    if (total > cfg.cap) throw CapExceeded(gen, total, cfg.cap);

    next.clear();
    next.reserve(total);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::uint32_t c = 0; c < counts[i]; ++c) {
        next.push_back(cur[i]);
        lane.apply(next.back(), aut.atom(aut.sample_atom(rng)));
      }
    }
    std::swap(cur, next);

    dists.resize(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) dists[i] = Lane::dist(cur[i]);
    out.push_back(make_snapshot(gen, rho, dists));
  }
  return out;
}

std::uint64_t rescaled_count(const GenerationSnapshot& snap, double threshold) {
  // Particles with distance ≤ threshold.
  if (threshold < 0.0) return 0;
  const auto last = std::min<double>(std::floor(threshold), static_cast<double>(snap.hist.size()) - 1.0);
  std::uint64_t c = 0;
  for (std::size_t k = 0; static_cast<double>(k) <= last; ++k) c += snap.hist[k];
  return c;
}

void check_scale(const GenerationSnapshot& snap, double sigma) {
  if (snap.n < 1) throw ValidationError("n", "rescaling needs n >= 1");
  if (!(sigma > 0.0)) throw DegenerateSigma("sigma must be positive to rescale, got " + std::to_string(sigma));
}

}  // namespace

int packed_window_capacity(int d) noexcept {
  const int bits = static_cast<int>(std::bit_width(static_cast<unsigned>(d - 2)));
  return 1 + 128 / bits;
}

int required_window(int horizon, int step_horizon) noexcept {
  // A letter is read again only after the word has come back down to it, and
  // the climb above it is at most half the remaining steps times L, plus the
  // letters pushed in the same step.
  const long long full = static_cast<long long>(horizon) * step_horizon;
  const long long half = static_cast<long long>((horizon + 1) / 2) * step_horizon + step_horizon;
  return static_cast<int>(std::min(full, half));
}

void BrwRunConfig::validate() const {
  if (!automaton) throw ValidationError("step", "no step automaton");
  if (horizon < 1) throw ValidationError("horizon", "must be >= 1");
  if (cap < 1) throw ValidationError("cap", "must be >= 1");
  if (replicates < 1) throw ValidationError("replicates", "must be >= 1");
  if (!full_word) {
    const int need = required_window(horizon, automaton->horizon());
    const int have = packed_window_capacity(automaton->space().d);
    if (need > have)
      throw BudgetExceeded("horizon " + std::to_string(horizon) + " needs a particle window of " +
                           std::to_string(need) + " letters, packed particles hold " + std::to_string(have) +
                           "; enable full_word");
  }
}

std::vector<GenerationSnapshot> run_brw(const BrwRunConfig& cfg, int replicate) {
  cfg.validate();
  if (replicate < 0) throw ValidationError("replicate", "must be nonnegative");
  return cfg.full_word ? evolve<FullWordLane>(cfg, replicate) : evolve<PackedLane>(cfg, replicate);
}

double mean_displacement(const GenerationSnapshot& snap) {
  if (snap.n < 1) throw ValidationError("n", "mean displacement needs n >= 1");
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < snap.hist.size(); ++k) total += k * snap.hist[k];
  return static_cast<double>(total) / snap.rho_n / snap.n;
}

std::vector<double> rescaled_cdf(const GenerationSnapshot& snap, double ell, double sigma,
                                 std::span<const double> xs) {
  check_scale(snap, sigma);
  const double centre = snap.n * ell;
  const double scale = sigma * std::sqrt(static_cast<double>(snap.n));
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double threshold = std::isinf(x) ? x : centre + x * scale;
    const std::uint64_t c = x == INFINITY ? snap.z : rescaled_count(snap, threshold);
    out.push_back(static_cast<double>(c) / snap.rho_n);
  }
  return out;
}

double interval_mass(const GenerationSnapshot& snap, double a, double b, double ell, double sigma) {
  check_scale(snap, sigma);
  if (a > b) throw ValidationError("interval", "a must not exceed b");
  const double centre = snap.n * ell;
  const double scale = sigma * std::sqrt(static_cast<double>(snap.n));
  const double lo = centre + a * scale;
  const double hi = centre + b * scale;
  std::uint64_t c = 0;
  for (std::size_t k = 0; k < snap.hist.size(); ++k) {
    const auto x = static_cast<double>(k);
    if (x >= lo && x <= hi) c += snap.hist[k];
  }
  return static_cast<double>(c) / snap.rho_n;
}

}  // namespace brw
