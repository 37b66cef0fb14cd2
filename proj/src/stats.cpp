#include "brw/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <numeric>

namespace brw {

JackknifeResult jackknife_std_dev(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 3) return {};
  const double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
  double sumsq = 0.0;
  for (double x : xs) sumsq += x * x;
  auto sd = [](double s, double s2, double m) {
    const double var = (s2 - s * s / m) / (m - 1.0);
    return std::sqrt(std::max(var, 0.0));
  };
  const double nd = static_cast<double>(n);
  JackknifeResult r;
  r.point = sd(sum, sumsq, nd);
  RunningStats loo;
  for (double x : xs) loo.add(sd(sum - x, sumsq - x * x, nd - 1.0));
  const double spread = loo.variance() * (nd - 1.0) / nd * (nd - 1.0);
  r.std_error = std::sqrt(spread);
  return r;
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

namespace {

// Merges adjacent cells until every pooled expected count reaches `min_expected`.
std::vector<std::pair<std::size_t, std::size_t>> pool_cells(std::span<const double> expected, double min_expected) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    acc += expected[i];
    if (acc >= min_expected) {
      groups.emplace_back(start, i + 1);
      start = i + 1;
      acc = 0.0;
    }
  }
  if (start < expected.size()) {
    if (groups.empty())
      groups.emplace_back(start, expected.size());
    else
      groups.back().second = expected.size();
  }
  return groups;
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs,
                               double min_expected) {
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> expected(expected_probs.size());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = expected_probs[i] * total;
  const auto groups = pool_cells(expected, min_expected);
  ChiSquareResult r;
  for (const auto& [lo, hi] : groups) {
    double o = 0.0, e = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      o += observed[i];
      e += expected[i];
    }
    if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
  }
  r.dof = static_cast<int>(groups.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_sf(r.statistic, r.dof) : 1.0;
  return r;
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b, double min_expected) {
  const std::size_t cells = std::max(a.size(), b.size());
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  std::vector<double> pooled(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i)
    pooled[i] = (i < a.size() ? a[i] : 0.0) + (i < b.size() ? b[i] : 0.0);
  const double smaller = std::min(na, nb);
  std::vector<double> scaled(cells);
  for (std::size_t i = 0; i < cells; ++i) scaled[i] = pooled[i] * smaller / (na + nb);
  const auto groups = pool_cells(scaled, min_expected);
  ChiSquareResult r;
  for (const auto& [lo, hi] : groups) {
    double oa = 0.0, ob = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      oa += i < a.size() ? a[i] : 0.0;
      ob += i < b.size() ? b[i] : 0.0;
    }
    const double tot = oa + ob;
    if (tot <= 0.0) continue;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = static_cast<int>(groups.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_sf(r.statistic, r.dof) : 1.0;
  return r;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace brw
