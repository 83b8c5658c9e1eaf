#include "laa/attack_model.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace laa {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTiny = 1e-300;

// Standard normal quantile of q given both q and 1 - q, each computed
// without cancellation by the caller.
double normal_quantile(double q, double one_minus_q) {
  if (q < 0.5) return -kSqrt2 * boost::math::erfc_inv(2.0 * std::max(q, kTiny));
  return kSqrt2 * boost::math::erfc_inv(2.0 * std::max(one_minus_q, kTiny));
}

// |u| -> |y| for one coordinate (both nonnegative).
double standardize_magnitude(double magnitude, double mu, double sigma) {
  if (magnitude == 0.0) return 0.0;
  const double w = (std::log(magnitude) - mu) / sigma;
  const double q = 0.5 * std::erfc(-w / kSqrt2);            // P(|U| <= magnitude)
  const double one_minus_q = 0.5 * std::erfc(w / kSqrt2);
  if (q < 0.5) return kSqrt2 * boost::math::erf_inv(q);
  return kSqrt2 * boost::math::erfc_inv(std::max(one_minus_q, kTiny));
}

// |y| -> |u|.
double destandardize_magnitude(double y, double mu, double sigma) {
  if (y == 0.0) return 0.0;
  const double q = std::erf(y / kSqrt2);
  const double one_minus_q = std::erfc(y / kSqrt2);
  return std::exp(mu + sigma * normal_quantile(q, one_minus_q));
}

}  // namespace

DensityParams DensityParams::uniform(std::size_t dimension, double mu, double sigma) {
  DensityParams p;
  p.mu.assign(dimension, mu);
  p.sigma.assign(dimension, sigma);
  p.validate();
  return p;
}

void DensityParams::validate() const {
  if (mu.size() != sigma.size()) throw ConfigError("density: mu/sigma size mismatch");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw ConfigError("density: sigma must be positive");
    if (!std::isfinite(mu[i])) throw ConfigError("density: mu must be finite");
  }
}

std::vector<double> effective_attack(std::span<const double> u, const NetworkModel& network) {
  if (u.size() != network.bus_count())
    throw std::invalid_argument("effective_attack: attack dimension mismatch");
  std::vector<double> eta(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double authority = network.vulnerability * network.buses[i].load;
    if (authority > 0.0) eta[i] = std::clamp(u[i] / authority, -1.0, 1.0);
  }
  return eta;
}

std::vector<double> realized_attack(std::span<const double> u, const NetworkModel& network) {
  auto eta = effective_attack(u, network);
  for (std::size_t i = 0; i < eta.size(); ++i)
    eta[i] *= network.vulnerability * network.buses[i].load;
  return eta;
}

double lognormal_log_pdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double z = (std::log(x) - mu) / sigma;
  return -0.5 * z * z - std::log(x) - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double lognormal_cdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) return 0.0;
  return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * kSqrt2));
}

double log_density(std::span<const double> u, const DensityParams& params) {
  if (u.size() != params.dimension())
    throw std::invalid_argument("log_density: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0 || !std::isfinite(u[i])) return -std::numeric_limits<double>::infinity();
    total += lognormal_log_pdf(std::abs(u[i]), params.mu[i], params.sigma[i]) - std::numbers::ln2;
  }
  return total;
}

std::vector<double> attack_from_standard(std::span<const double> y, const DensityParams& params) {
  if (y.size() != params.dimension())
    throw std::invalid_argument("attack_from_standard: dimension mismatch");
  std::vector<double> u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double m = destandardize_magnitude(std::abs(y[i]), params.mu[i], params.sigma[i]);
    u[i] = std::signbit(y[i]) ? -m : m;
  }
  return u;
}

std::vector<double> standard_from_attack(std::span<const double> u, const DensityParams& params) {
  if (u.size() != params.dimension())
    throw std::invalid_argument("standard_from_attack: dimension mismatch");
  std::vector<double> y(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = standardize_magnitude(std::abs(u[i]), params.mu[i], params.sigma[i]);
    y[i] = std::signbit(u[i]) ? -m : m;
  }
  return y;
}

double standard_normal_log_density(std::span<const double> y) {
  double total = 0.0;
  for (double v : y) total += -0.5 * v * v;
  return total - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

SimOutcome evaluate_attack(std::span<const double> u, const Simulator& simulator) {
  const auto eta = effective_attack(u, simulator.network());
  return simulator.run(eta);
}

bool indicator_c(std::span<const double> u, const Simulator& simulator) {
  return evaluate_attack(u, simulator).failure;
}

}  // namespace laa
