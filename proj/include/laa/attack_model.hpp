#pragma once

#include "laa/grid_model.hpp"
#include "laa/simulator.hpp"

#include <span>
#include <vector>

namespace laa {

/// Location/scale of the lognormal law of each |u_i|.
struct DensityParams {
  std::vector<double> mu;
  std::vector<double> sigma;

  static DensityParams uniform(std::size_t dimension, double mu, double sigma);
  std::size_t dimension() const { return mu.size(); }
  void validate() const;
};

/// Per-bus proportional change of vulnerable load. The attacker's authority
/// saturates at [-nu P^L, +nu P^L]; buses without vulnerable load get 0.
std::vector<double> effective_attack(std::span<const double> u, const NetworkModel& network);

/// Realised load alteration eta_i nu P^L_i, i.e. u clipped to authority.
std::vector<double> realized_attack(std::span<const double> u, const NetworkModel& network);

/// Log-density of the signed attack: |u_i| lognormal, sign a fair coin,
/// coordinates independent. Returns -infinity if any coordinate is zero.
double log_density(std::span<const double> u, const DensityParams& params);

/// Log-pdf of Lognormal(mu, sigma^2) at x > 0.
double lognormal_log_pdf(double x, double mu, double sigma);

/// CDF of |u_i| (lognormal), used for overlays and one-sample tests.
double lognormal_cdf(double x, double mu, double sigma);

// The sampler walks in standardized coordinates y in which the attack law is
// a standard normal: u_i = F_i^{-1}(Phi(y_i)) with F_i the CDF of the signed
// attack density. The map is monotone and sends y = 0 to u = 0.

std::vector<double> attack_from_standard(std::span<const double> y, const DensityParams& params);
std::vector<double> standard_from_attack(std::span<const double> u, const DensityParams& params);

/// Sum of standard-normal log-pdfs.
double standard_normal_log_density(std::span<const double> y);

/// Full simulation of an attack vector.
SimOutcome evaluate_attack(std::span<const double> u, const Simulator& simulator);

/// 1_C(u): whether the attack activates at least one emergency response.
bool indicator_c(std::span<const double> u, const Simulator& simulator);

}  // namespace laa
