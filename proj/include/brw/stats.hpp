#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace brw {

/// Welford accumulator. Adding values in a fixed order gives bit-identical results.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double std_dev() const noexcept { return std::sqrt(variance()); }
  double std_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct JackknifeResult {
  double point = 0.0;
  double std_error = 0.0;
};

/// Sample standard deviation with its leave-one-out jackknife standard error.
JackknifeResult jackknife_std_dev(std::span<const double> xs);

/// Standard normal CDF Φ.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(χ²_k ≥ x).
double chi_square_sf(double x, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of `observed` counts against `expected_probs`.
/// Cells with expected count below `min_expected` are pooled into their
/// neighbour so the χ² approximation holds.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs,
                               double min_expected = 5.0);

/// Two-sample χ² homogeneity test on binned counts.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      double min_expected = 5.0);

double median(std::vector<double> xs);

}  // namespace brw
