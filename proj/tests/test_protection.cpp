#include <doctest.h>

#include "fixtures.hpp"
#include "laa/simulator.hpp"

#include <random>

using namespace laa;

namespace {

ErThresholds four_bus_thresholds() {
  return ErThresholds::from_hz(50.0, 0.1, 51.5, {49.5, 49.0, 48.5, 48.0}, 0.0);
}

struct Scan {
  NetworkModel net = fixtures::four_bus();
  ErThresholds th = four_bus_thresholds();
  DynamicState state = solve_equilibrium(net);
  std::vector<double> eta = std::vector<double>(4, 0.0);

  Inspection run() {
    return inspect(net, th, effective_susceptance(net, state.indicators.line_online), state, eta,
                   1.0);
  }
};

}  // namespace

TEST_CASE("thresholds convert from Hz") {
  const auto th = four_bus_thresholds();
  CHECK(th.rocof_limit == doctest::Approx(0.2 * std::numbers::pi));
  CHECK(th.over_speed == doctest::Approx(3.0 * std::numbers::pi));
  CHECK(th.ufls_speed[0] == doctest::Approx(-std::numbers::pi));
  CHECK(th.ufls_speed[3] == doctest::Approx(-4.0 * std::numbers::pi));
  CHECK_THROWS_AS(ErThresholds::from_hz(50.0, 1.0, 51.0, {49.0, 49.5, 48.0, 47.0}, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(ErThresholds::from_hz(50.0, 0.0, 51.0, {49.5, 49.0, 48.5, 48.0}, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(ErThresholds::from_hz(50.0, 1.0, 49.0, {49.5, 49.0, 48.5, 48.0}, 0.0),
                  ConfigError);
}

TEST_CASE("kind names round trip") {
  for (auto k : {ErKind::rigs, ErKind::ofgs, ErKind::ufls, ErKind::line_trip})
    CHECK(er_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(er_kind_from_string("Blackout"));
}

TEST_CASE("equilibrium triggers nothing") {
  Scan s;
  const auto r = s.run();
  CHECK(r.events.empty());
  CHECK(r.indicators == s.state.indicators);
}

TEST_CASE("one UFLS stage") {
  Scan s;
  s.state.speed[2] = -3.2;
  const auto r = s.run();
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0] == ErEvent{ErKind::ufls, 2, 1.0, 1});
  CHECK(r.indicators.ufls_stage == std::vector<int>{0, 0, 1, 0});
}

TEST_CASE("two UFLS stages crossed in one scan both fire") {
  Scan s;
  s.state.speed[3] = -6.5;
  const auto r = s.run();
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].stage == 1);
  CHECK(r.events[1].stage == 2);
  CHECK(r.indicators.ufls_stage[3] == 2);

  s.state.indicators = r.indicators;
  CHECK(s.run().events.empty());
}

TEST_CASE("RIGS at generator 2") {
  Scan s;
  s.state.governor[1] = 2.0;
  const auto r = s.run();
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].kind == ErKind::rigs);
  CHECK(r.events[0].location == 1);
  CHECK(r.indicators.generator_online == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("RIGS takes precedence over OFGS") {
  Scan s;
  s.state.governor[0] = 1.0;
  s.state.speed[0] = 10.0;
  const auto r = s.run();
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].kind == ErKind::rigs);
}

TEST_CASE("OFGS on over-speed") {
  Scan s;
  s.net.damping = 0.0;
  s.state.speed[1] = 10.0;
  const auto r = s.run();
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0] == ErEvent{ErKind::ofgs, 1, 1.0, 0});
}

TEST_CASE("line trip above the flow limit") {
  Scan s;
  s.state.angle[2] = s.state.angle[3] + 0.6;
  const auto r = s.run();
  bool tripped = false;
  for (const auto& e : r.events) tripped |= e.kind == ErKind::line_trip && e.location == 2;
  CHECK(tripped);
  CHECK(r.indicators.line_online[2] == 0);
}

TEST_CASE("no UFLS at the bus of a disconnected generator") {
  Scan s;
  s.state.indicators.generator_online[0] = 0;
  s.state.speed[0] = -20.0;
  for (const auto& e : s.run().events) CHECK_FALSE((e.kind == ErKind::ufls && e.location == 0));
}

TEST_CASE("collapsed state is rejected") {
  Scan s;
  s.state.indicators.generator_online = {0, 0};
  CHECK_THROWS_AS(s.run(), std::logic_error);
}

TEST_CASE("scans are idempotent and monotone on random states") {
  const auto net = fixtures::ktas().preset.network;
  const auto th = fixtures::ktas().thresholds();
  const auto eq = solve_equilibrium(net);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    DynamicState s = eq;
    std::vector<double> eta(net.bus_count());
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
      s.angle[i] += 0.3 * normal(rng);
      s.speed[i] = 2.0 * normal(rng);
      s.voltage[i] *= 1.0 + 0.05 * normal(rng);
      eta[i] = unit(rng);
    }
    for (std::size_t k = 0; k < net.lines.size(); ++k)
      if (rng() % 10 == 0) s.indicators.line_online[k] = 0;
    const auto b = effective_susceptance(net, s.indicators.line_online);
    const auto first = inspect(net, th, b, s, eta, 0.5);

    for (std::size_t g = 0; g < net.generator_count; ++g)
      CHECK(first.indicators.generator_online[g] <= s.indicators.generator_online[g]);
    for (std::size_t k = 0; k < net.lines.size(); ++k)
      CHECK(first.indicators.line_online[k] <= s.indicators.line_online[k]);
    for (std::size_t i = 0; i < net.bus_count(); ++i)
      CHECK(first.indicators.ufls_stage[i] >= s.indicators.ufls_stage[i]);

    if (total_inertia(net, first.indicators) <= 0.0) continue;
    DynamicState next = s;
    next.indicators = first.indicators;
    const auto second =
        inspect(net, th, effective_susceptance(net, next.indicators.line_online), next, eta, 0.5);
    CHECK(second.events.empty());
    CHECK(second.indicators == first.indicators);
  }
}
