#include <doctest.h>

#include "fixtures.hpp"
#include "laa/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace laa;

TEST_CASE("effective susceptance removes tripped lines from both endpoints") {
  const auto net = fixtures::four_bus();
  const auto b0 = net.base_susceptance();
  const auto nominal = Indicators::nominal(net);
  CHECK(effective_susceptance(net, nominal.line_online) == b0);

  auto online = nominal.line_online;
  online[2] = 0;
  const auto b = effective_susceptance(net, online);
  CHECK(b(2, 3) == 0.0);
  CHECK(b(3, 2) == 0.0);
  CHECK(b(2, 2) == doctest::Approx(b0(2, 2) + 8.0));
  CHECK(b(3, 3) == doctest::Approx(b0(3, 3) + 8.0));
  for (Eigen::Index i = 0; i < b.rows(); ++i) CHECK(std::abs(b.row(i).sum()) < 1e-12);

  // inter-area block of a two-area network with its only tie open
  for (Eigen::Index i : {0, 2})
    for (Eigen::Index j : {1, 3}) CHECK(b(i, j) == 0.0);
}

TEST_CASE("base susceptance is symmetric with nonpositive diagonal") {
  const auto b = fixtures::ktas().preset.network.base_susceptance();
  CHECK((b - b.transpose()).norm() == 0.0);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    CHECK(b(i, i) <= 0.0);
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      if (i != j) CHECK(b(i, j) >= 0.0);
  }
}

TEST_CASE("net generation clips at maximum output") {
  const GeneratorParams g{1.0, 0.1, 1.0, 0.9, 0.0, 1.0};
  CHECK(net_generation(g, 0.2) == doctest::Approx(1.0));
  CHECK(net_generation(g, 0.0) == 0.9);
  CHECK(net_generation(g, -0.3) == doctest::Approx(0.6));
}

TEST_CASE("net load") {
  CHECK(net_load(1.0, 0.7, 0.0, 0) == 1.0);
  CHECK(net_load(1.0, -1.0, 0.0, 0) == 1.0);
  CHECK(net_load(2.0, 1.0, 0.5, 2) == doctest::Approx(2.4));
  CHECK(net_load(3.0, -1.0, 1.0, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(net_load(1.0, 1.5, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(net_load(1.0, 0.0, 0.5, 5), std::invalid_argument);
}

TEST_CASE("line flow") {
  auto net = fixtures::two_bus(0.0, 1.0);
  DynamicState s;
  s.angle = {0.3, 0.3};
  s.voltage = {1.0, 1.0};
  s.speed = {0.0, 0.0};
  s.governor = {0.0};
  s.indicators = Indicators::nominal(net);
  CHECK(line_flow(net, s, 0) == 0.0);
  s.angle = {std::numbers::pi / 2, 0.0};
  CHECK(line_flow(net, s, 0) == doctest::Approx(1.0));
  s.indicators.line_online[0] = 0;
  CHECK(line_flow(net, s, 0) == 0.0);
}

TEST_CASE("single bus acceleration equals net injection over inertia") {
  NetworkModel net;
  net.generator_count = 1;
  net.buses = {{"G", 1, 1.0, 0.0, 1.0, 0.9}};
  net.generators = {{1.0, 0.0, 2.0, 0.9, 0.0, 1.0}};
  net.damping = 0.0;
  DynamicState s{{0.0}, {0.0}, {1.0}, {0.1}, Indicators::nominal(net)};
  const std::vector<double> eta{0.0};
  const auto d = derivatives(net, net.base_susceptance(), s, eta);
  CHECK(d.speed[0] == doctest::Approx(0.1));
  CHECK(rocof(net, net.base_susceptance(), s, eta)[0] == d.speed[0]);
}

TEST_CASE("losing every generator is reported as a domain error") {
  auto net = fixtures::two_bus();
  auto s = solve_equilibrium(net);
  s.indicators.generator_online[0] = 0;
  const std::vector<double> eta(2, 0.0);
  CHECK_THROWS_AS(derivatives(net, net.base_susceptance(), s, eta), std::domain_error);
}

TEST_CASE("injections of a lossless network sum to zero") {
  const auto net = fixtures::ktas().preset.network;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-1.5, 1.5), volt(0.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    DynamicState s;
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
      s.angle.push_back(angle(rng));
      s.voltage.push_back(volt(rng));
    }
    const auto p = network_injection(net.base_susceptance(), s);
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(std::abs(sum) < 1e-9);
  }
}

TEST_CASE("total inertia drops exactly when a generator is shed") {
  const auto net = fixtures::ktas().preset.network;
  auto ind = Indicators::nominal(net);
  double m = total_inertia(net, ind);
  for (std::size_t g = 0; g < net.generator_count; ++g) {
    ind.generator_online[g] = 0;
    const double next = total_inertia(net, ind);
    CHECK(next < m);
    m = next;
  }
  CHECK(m == 0.0);
}

TEST_CASE("governor is idle inside the deadband") {
  auto net = fixtures::ktas().preset.network;
  net.deadband = 0.1;
  auto s = solve_equilibrium(net);
  const std::vector<double> eta(net.bus_count(), 0.0);
  s.speed[0] = 0.09;
  s.speed[1] = -0.1;
  s.speed[2] = 0.11;
  const auto d = derivatives(net, net.base_susceptance(), s, eta);
  CHECK(d.governor[0] == 0.0);
  CHECK(d.governor[1] == 0.0);
  CHECK(d.governor[2] == doctest::Approx(-net.generators[2].droop * 0.11));
}

TEST_CASE("derivatives are deterministic") {
  const auto net = fixtures::ktas().preset.network;
  auto s = solve_equilibrium(net);
  s.speed[3] = 0.4;
  std::vector<double> eta(net.bus_count(), 0.0);
  eta[5] = 0.6;
  const auto a = derivatives(net, net.base_susceptance(), s, eta);
  const auto b = derivatives(net, net.base_susceptance(), s, eta);
  CHECK(a.angle == b.angle);
  CHECK(a.speed == b.speed);
  CHECK(a.voltage == b.voltage);
  CHECK(a.governor == b.governor);
}

TEST_CASE("load step at bus 6 decelerates bus 6") {
  const auto net = fixtures::ktas().preset.network;
  const auto s = solve_equilibrium(net);
  std::vector<double> eta(net.bus_count(), 0.0);
  eta[5] = 1.0;
  const auto up = rocof(net, net.base_susceptance(), s, eta);
  CHECK(up[5] < 0.0);
  CHECK(up[5] == doctest::Approx(-net.vulnerability * 17.67 / total_inertia(net, s.indicators)));
  eta[5] = -1.0;
  CHECK(rocof(net, net.base_susceptance(), s, eta)[5] > 0.0);
}
