#include "rsf/lab/stats.hpp"

#include "rsf/errors.hpp"

namespace rsf::lab {

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& floor) {
  if (x.size() != y.size() || x.size() != floor.size()) throw ShapeError("loglog_slope: length mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > floor[i]) || !(x[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 3) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

double two_sided_normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("two_sided_normal_quantile: alpha must lie in (0, 1)");
  // P(|Z| > z) = erfc(z / sqrt(2)), decreasing in z.
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rsf::lab
