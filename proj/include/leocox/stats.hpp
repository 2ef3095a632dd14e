#pragma once

#include <span>

namespace leocox::stats {

struct KsResult {
  double statistic;
  double p_value;
};

/// Kolmogorov survival function Q(x) = 2 sum (-1)^(j-1) exp(-2 j^2 x^2).
double kolmogorov_q(double x);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
/// usual small-sample correction. Infinite values are allowed.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// Pearson chi-square goodness of fit; returns the p-value.
double chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                      int estimated_params = 0);

}  // namespace leocox::stats
