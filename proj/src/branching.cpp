#include "brw/branching.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "brw/error.hpp"

namespace brw {

OffspringDistribution OffspringDistribution::create(std::span<const OffspringAtom> atoms) {
  if (atoms.empty()) throw ValidationError("offspring", "at least one atom is required");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string field = "offspring[" + std::to_string(i) + "]";
    if (atoms[i].k < 1) throw ValidationError(field, "k must be >= 1 (no extinction), got " + std::to_string(atoms[i].k));
    if (!(atoms[i].prob > 0.0) || !std::isfinite(atoms[i].prob))
      throw ValidationError(field, "weight must be positive and finite");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms[j].k == atoms[i].k) throw ValidationError(field, "duplicate k = " + std::to_string(atoms[i].k));
    total += atoms[i].prob;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("offspring", "weights sum to " + std::to_string(total) + ", expected 1");

  OffspringDistribution pi;
  pi.atoms_.assign(atoms.begin(), atoms.end());
  std::sort(pi.atoms_.begin(), pi.atoms_.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  double acc = 0.0;
  for (const auto& a : pi.atoms_) {
    acc += a.prob;
    pi.cumulative_.push_back(acc);
  }
  return pi;
}

OffspringDistribution OffspringDistribution::create(std::initializer_list<std::pair<int, double>> atoms) {
  std::vector<OffspringAtom> v;
  for (const auto& [k, p] : atoms) v.push_back({k, p});
  return create(v);
}

OffspringDistribution OffspringDistribution::point_mass(int k) {
  const OffspringAtom a{k, 1.0};
  return create(std::span<const OffspringAtom>(&a, 1));
}

double OffspringDistribution::prob(int k) const noexcept {
  for (const auto& a : atoms_)
    if (a.k == k) return a.prob;
  return 0.0;
}

MomentsReport moments(const OffspringDistribution& pi) {
  MomentsReport r;
  for (const auto& a : pi.atoms()) {
    r.moments.rho += a.k * a.prob;
    r.moments.theta += static_cast<double>(a.k) * a.k * a.prob;
  }
  if (r.moments.rho > 1.0) {
    r.criticality = Criticality::Supercritical;
  } else if (r.moments.rho == 1.0) {
    r.criticality = Criticality::Critical;
    r.flag = "critical offspring law (rho = 1): the population does not grow";
  } else {
    r.criticality = Criticality::Subcritical;
    r.flag = "subcritical offspring law (rho < 1)";
  }
  return r;
}

OffspringDistribution size_biased(const OffspringDistribution& pi, int j) {
  if (j != 1 && j != 2) throw ValidationError("j", "size-biasing order must be 1 or 2");
  std::vector<OffspringAtom> out;
  double w = 0.0;
  for (const auto& a : pi.atoms()) {
    const double p = a.prob * std::pow(static_cast<double>(a.k), j);
    out.push_back({a.k, p});
    w += p;
  }
  for (auto& a : out) a.prob /= w;
  // Renormalizing by the computed sum keeps the total within rounding of 1.
  return OffspringDistribution::create(out);
}

double exact_second_moment_Wn(const Moments& m, int n) {
  if (n < 0) throw ValidationError("n", "must be nonnegative");
  const double rho2 = m.rho * m.rho;
  double series = 0.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k) {
    series += term;
    term /= m.rho;
  }
  return 1.0 + (m.theta - rho2) / rho2 * series;
}

double limit_second_moment(const Moments& m) {
  if (!(m.rho > 1.0)) throw ValidationError("rho", "limit of E[W_n^2] needs rho > 1");
  return 1.0 + (m.theta - m.rho * m.rho) / (m.rho * (m.rho - 1.0));
}

double second_moment_recursion(const Moments& m, int n) {
  // Track E[Z_k] and E[Z_k²] jointly; the conditional second moment is linear in both.
  double first = 1.0;
  double second = 1.0;
  for (int k = 0; k < n; ++k) {
    second = (second - first) * m.rho * m.rho + first * m.theta;
    first *= m.rho;
  }
  return second;
}

GenerationSizes sample_generation_sizes(const OffspringDistribution& pi, int n, std::uint64_t cap, Rng& rng) {
  if (n < 0) throw ValidationError("n", "must be nonnegative");
  if (cap < 1) throw ValidationError("cap", "must be >= 1");
  const auto atoms = pi.atoms();
  GenerationSizes out;
  out.z.reserve(static_cast<std::size_t>(n) + 1);
  std::uint64_t z = 1;
  out.z.push_back(z);
  for (int gen = 1; gen <= n; ++gen) {
    std::uint64_t next = 0;
    if (z <= kDirectDrawLimit) {
      for (std::uint64_t i = 0; i < z; ++i) next += static_cast<std::uint64_t>(pi.sample(rng));
    } else {
      // Multinomial counts by sequential conditional binomials.
      std::uint64_t left = z;
      double mass_left = 1.0;
      for (std::size_t i = 0; i + 1 < atoms.size() && left > 0; ++i) {
        const double p = std::clamp(atoms[i].prob / mass_left, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> bin(left, p);
        const std::uint64_t c = bin(rng);
        next += c * static_cast<std::uint64_t>(atoms[i].k);
        left -= c;
        mass_left -= atoms[i].prob;
      }
      next += left * static_cast<std::uint64_t>(atoms.back().k);
    }
    z = next;
    if (z > cap) throw CapExceeded(gen, z, cap);
    out.z.push_back(z);
  }
  const Moments m = moments(pi).moments;
  out.w_n = static_cast<double>(z) / std::pow(m.rho, n);
  return out;
}

}  // namespace brw
