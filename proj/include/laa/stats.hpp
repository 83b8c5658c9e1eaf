#pragma once

#include <functional>
#include <span>

namespace laa {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased

/// Standard error of the mean of a correlated series by non-overlapping batch
/// means. `batches` = 0 picks floor(sqrt(n)).
double batch_means_standard_error(std::span<const double> x, std::size_t batches = 0);

}  // namespace laa
