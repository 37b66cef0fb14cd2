#pragma once

// Offspring laws of the Galton-Watson tree: moments, size-biasing, sampling
// of generation sizes and the closed-form second moments of W_n = Z_n / ρ^n.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

struct OffspringAtom {
  int k = 1;
  double prob = 0.0;
};

/// Finite-support law π on {1, 2, ...}. π(0) = 0 is enforced, so the tree never dies out.
class OffspringDistribution {
 public:
  /// Throws ValidationError naming the offending atom ("offspring[i]").
  static OffspringDistribution create(std::span<const OffspringAtom> atoms);
  static OffspringDistribution create(std::initializer_list<std::pair<int, double>> atoms);
  static OffspringDistribution point_mass(int k);

  std::span<const OffspringAtom> atoms() const noexcept { return atoms_; }
  int max_k() const noexcept { return atoms_.back().k; }
  double prob(int k) const noexcept;

  int sample(Rng& rng) const noexcept {
    const double u = rng.uniform();
    const std::size_t last = atoms_.size() - 1;
    for (std::size_t i = 0; i < last; ++i)
      if (u < cumulative_[i]) return atoms_[i].k;
    return atoms_[last].k;
  }

 private:
  std::vector<OffspringAtom> atoms_;  // sorted by k
  std::vector<double> cumulative_;
};

struct Moments {
  double rho = 0.0;    // Σ k π(k)
  double theta = 0.0;  // Σ k² π(k)
  bool supercritical() const noexcept { return rho > 1.0; }
};

enum class Criticality { Subcritical, Critical, Supercritical };

struct MomentsReport {
  Moments moments;
  Criticality criticality = Criticality::Supercritical;
  /// Non-empty when ρ ≤ 1; such runs are allowed but never grow.
  std::string flag;
};

MomentsReport moments(const OffspringDistribution& pi);

/// π^{(j)}(k) = π(k) k^j / w_j with w_1 = ρ, w_2 = θ; j ∈ {1, 2}.
OffspringDistribution size_biased(const OffspringDistribution& pi, int j);

/// E[W_n²] = 1 + ((θ − ρ²)/ρ²) Σ_{k<n} ρ^{-k}.
double exact_second_moment_Wn(const Moments& m, int n);

/// E[W²] = 1 + (θ − ρ²)/(ρ(ρ − 1)), the n → ∞ limit of the above. Needs ρ > 1.
double limit_second_moment(const Moments& m);

/// E[Z_n²] by iterating E[Z_{k+1}² | Z_k] = (Z_k² − Z_k)ρ² + Z_k θ from Z_0 = 1.
double second_moment_recursion(const Moments& m, int n);

struct GenerationSizes {
  std::vector<std::uint64_t> z;  // Z_0..Z_n
  double w_n = 1.0;              // Z_n / ρ^n
};

/// Z_0 = 1 and Z_{k+1} = sum of Z_k independent draws from π. Throws
/// CapExceeded when some Z_k exceeds `cap`.
///
/// Draws are made one per individual while Z_k ≤ kDirectDrawLimit; larger
/// generations draw the multinomial counts of each offspring value instead,
/// which has the same law.
GenerationSizes sample_generation_sizes(const OffspringDistribution& pi, int n, std::uint64_t cap, Rng& rng);

inline constexpr std::uint64_t kDirectDrawLimit = 64;

}  // namespace brw
