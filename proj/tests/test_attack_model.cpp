#include <doctest.h>

#include "fixtures.hpp"
#include "laa/attack_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace laa;

TEST_CASE("effective attack saturates at the attacker's authority") {
  const auto net = fixtures::ktas().preset.network;  // nu = 0.8, loads 9.67 and 17.67
  std::vector<double> u{5.0, -5.0, 1.0, 1.0, 0.8 * 9.67 * 0.5, -100.0};
  const auto eta = effective_attack(u, net);
  for (std::size_t g = 0; g < 4; ++g) CHECK(eta[g] == 0.0);
  CHECK(eta[4] == doctest::Approx(0.5));
  CHECK(eta[5] == -1.0);
  const auto real = realized_attack(u, net);
  CHECK(real[4] == doctest::Approx(u[4]));
  CHECK(real[5] == doctest::Approx(-0.8 * 17.67));
  CHECK_THROWS_AS(effective_attack(std::vector<double>{1.0}, net), std::invalid_argument);
}

TEST_CASE("effective attack is zero without vulnerable load") {
  auto net = fixtures::two_bus();
  net.vulnerability = 0.0;
  const auto eta = effective_attack(std::vector<double>{3.0, 3.0}, net);
  CHECK(eta == std::vector<double>{0.0, 0.0});
}

TEST_CASE("log density at known points") {
  const auto one = DensityParams::uniform(1, 0.0, 1.0);
  CHECK(log_density(std::vector<double>{1.0}, one) == doctest::Approx(-1.6121).epsilon(1e-4));

  const auto two = DensityParams::uniform(2, 0.0, 4.0);
  // 2 * log(1 / (2 * 4 * sqrt(2 pi))) evaluated at |u| = 1
  const double oracle = 2.0 * std::log(1.0 / (2.0 * 4.0 * std::sqrt(2.0 * std::numbers::pi)));
  CHECK(log_density(std::vector<double>{1.0, 1.0}, two) == doctest::Approx(oracle));
  CHECK(log_density(std::vector<double>{1.0, 1.0}, two) == doctest::Approx(-5.9966).epsilon(1e-4));
}

TEST_CASE("log density is even in every coordinate and -inf at zero") {
  const auto p = DensityParams::uniform(3, 0.2, 1.5);
  const std::vector<double> u{0.3, -2.0, 7.0};
  const double ref = log_density(u, p);
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = u;
    v[i] = -v[i];
    CHECK(log_density(v, p) == ref);
  }
  CHECK(log_density(std::vector<double>{0.3, 0.0, 7.0}, p) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_density(std::vector<double>{1.0}, p), std::invalid_argument);
}

TEST_CASE("density parameters are validated") {
  CHECK_THROWS_AS(DensityParams::uniform(2, 0.0, 0.0), ConfigError);
  DensityParams p{{0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("lognormal cdf") {
  CHECK(lognormal_cdf(1.0, 0.0, 2.0) == doctest::Approx(0.5));
  CHECK(lognormal_cdf(0.0, 0.0, 2.0) == 0.0);
  CHECK(lognormal_cdf(std::exp(1.0), 0.0, 1.0) == doctest::Approx(0.841344746));
}

TEST_CASE("standardized coordinates round trip") {
  const DensityParams p{{0.0, 1.0, -2.0}, {4.0, 0.5, 1.0}};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const std::vector<double> y{normal(rng), normal(rng), normal(rng)};
    const auto u = attack_from_standard(y, p);
    const auto back = standard_from_attack(u, p);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::signbit(u[i]) == std::signbit(y[i]));
      CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-9));
    }
  }
  CHECK(attack_from_standard(std::vector<double>{0.0, 0.0, 0.0}, p) ==
        std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("standardized map sends the half-mass point to the median") {
  const auto p = DensityParams::uniform(1, 0.7, 2.0);
  const double y = std::sqrt(2.0) * 0.4769362762044699;  // erf(y / sqrt 2) = 0.5
  const auto u = attack_from_standard(std::vector<double>{y}, p);
  CHECK(u[0] == doctest::Approx(std::exp(0.7)));
}

TEST_CASE("standardized map is monotone") {
  const auto p = DensityParams::uniform(1, 0.0, 4.0);
  double prev = -std::numeric_limits<double>::infinity();
  for (double y = -8.0; y <= 8.0; y += 0.01) {
    const double u = attack_from_standard(std::vector<double>{y}, p)[0];
    CHECK(u >= prev);
    prev = u;
  }
}

TEST_CASE("standard normal log density") {
  CHECK(standard_normal_log_density(std::vector<double>{0.0}) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)));
  CHECK(standard_normal_log_density(std::vector<double>{1.0, -1.0}) ==
        doctest::Approx(-1.0 - std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("attack indicator on KTAS") {
  const auto cfg = fixtures::ktas();
  const Simulator sim(cfg.preset.network, cfg.thresholds(), cfg.simulation);
  CHECK_FALSE(indicator_c(std::vector<double>(6, 0.0), sim));
  CHECK(indicator_c(std::vector<double>{0, 0, 0, 0, 100.0, 100.0}, sim));
}
