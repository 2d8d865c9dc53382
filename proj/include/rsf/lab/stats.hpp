#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace rsf::lab {

/// Welford accumulator for a sample mean and its standard error.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Least-squares slope of log(y) against log(x), skipping points with
/// y <= floor[i]. Returns nothing when fewer than three points remain.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& floor);

/// z with P(|N(0,1)| > z) = alpha.
double two_sided_normal_quantile(double alpha);

}  // namespace rsf::lab
