#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levylab {

struct MeanEstimate {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double ci_halfwidth = 0.0; // 95% normal-approximation half width
  std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic p-value of the two-sample KS statistic (Kolmogorov series with
/// the Stephens small-sample correction).
double ks_pvalue(double statistic, std::size_t n, std::size_t m);

/// Asymptotic critical value c(level) * sqrt((n+m)/(n m)) of the two-sample test.
double ks_critical_value(std::size_t n, std::size_t m, double level = 0.05);

} // namespace levylab
