#include "laa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace laa {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double p_from_statistic(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  return {d, p_from_statistic(d, nx * ny / (nx + ny))};
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS test needs a nonempty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, p_from_statistic(d, n)};
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double batch_means_standard_error(std::span<const double> x, std::size_t batches) {
  if (batches == 0) batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(x.size())));
  if (batches < 2 || x.size() < 2 * batches)
    throw std::invalid_argument("series too short for batch means");
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean(x.subspan(b * len, len));
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

}  // namespace laa
