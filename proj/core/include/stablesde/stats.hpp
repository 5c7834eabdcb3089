#pragma once

#include <span>
#include <vector>

namespace stablesde {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares on (log x, log y); non-positive entries are rejected.
LinearFit fit_log_log(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v);
double median(std::vector<double> v);

/// (E|v|^q)^{1/q} over the samples.
double lq_norm(std::span<const double> v, double q);

/// W1 distance between two empirical laws on the line with equal sample counts.
double wasserstein1(std::vector<double> a, std::vector<double> b);

}  // namespace stablesde
