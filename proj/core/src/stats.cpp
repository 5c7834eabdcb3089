#include "stablesde/stats.hpp"

#include <algorithm>
#include <cmath>

#include "stablesde/errors.hpp"

namespace stablesde {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line needs two equal-length samples of size >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

LinearFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("fit_log_log: entries must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double lq_norm(std::span<const double> v, double q) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), q);
  return v.empty() ? 0.0 : std::pow(s / static_cast<double>(v.size()), 1.0 / q);
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("wasserstein1 needs equal, non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace stablesde
