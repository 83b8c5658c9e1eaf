#include "laa/protection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace laa {

std::string_view to_string(ErKind kind) {
  switch (kind) {
    case ErKind::rigs:
      return "RIGS";
    case ErKind::ofgs:
      return "OFGS";
    case ErKind::ufls:
      return "UFLS";
    case ErKind::line_trip:
      return "LineTrip";
  }
  return "?";
}

ErKind er_kind_from_string(std::string_view name) {
  if (name == "RIGS") return ErKind::rigs;
  if (name == "OFGS") return ErKind::ofgs;
  if (name == "UFLS") return ErKind::ufls;
  if (name == "LineTrip") return ErKind::line_trip;
  throw std::invalid_argument("unknown emergency response kind: " + std::string(name));
}

ErThresholds ErThresholds::from_hz(double nominal_hz, double rocof_hz_per_s,
                                   double over_frequency_hz, const std::array<double, 4>& ufls_hz,
                                   double inspection_interval) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(rocof_hz_per_s > 0.0)) throw ConfigError("protection: RoCoF limit must be positive");
  if (!(over_frequency_hz > nominal_hz))
    throw ConfigError("protection: over-frequency limit must exceed nominal frequency");
  for (std::size_t k = 0; k < ufls_hz.size(); ++k) {
    if (!(ufls_hz[k] > 0.0)) throw ConfigError("protection: UFLS stages must be positive");
    if (k == 0 && !(ufls_hz[0] < nominal_hz))
      throw ConfigError("protection: first UFLS stage must lie below nominal frequency");
    if (k > 0 && !(ufls_hz[k] < ufls_hz[k - 1]))
      throw ConfigError("protection: UFLS stages must be strictly decreasing");
  }
  if (!(inspection_interval >= 0.0))
    throw ConfigError("protection: inspection interval must be nonnegative");

  ErThresholds t;
  t.rocof_limit = two_pi * rocof_hz_per_s;
  t.over_speed = two_pi * (over_frequency_hz - nominal_hz);
  for (std::size_t k = 0; k < ufls_hz.size(); ++k) t.ufls_speed[k] = two_pi * (ufls_hz[k] - nominal_hz);
  t.inspection_interval = inspection_interval;
  return t;
}

Inspection inspect(const NetworkModel& network, const ErThresholds& thresholds,
                   const Eigen::MatrixXd& susceptance, const DynamicState& state,
                   std::span<const double> eta, double t) {
  Inspection result{state.indicators, {}};
  auto& ind = result.indicators;

  const bool any_online =
      std::find(ind.generator_online.begin(), ind.generator_online.end(), 1) !=
      ind.generator_online.end();
  if (!any_online) throw std::logic_error("inspect: simulation has already collapsed");

  // Shedding changes M(psi) and a trip changes B(Omega), which moves the RoCoF
  // seen by the remaining machines; rescan until the indicators settle so the
  // scan is idempotent.
  Eigen::MatrixXd b = susceptance;
  DynamicState view = state;
  for (;;) {
    const std::size_t before = result.events.size();
    view.indicators = ind;
    if (total_inertia(network, ind) <= 0.0) break;
    const auto accel = rocof(network, b, view, eta);

    for (std::size_t g = 0; g < network.generator_count; ++g) {
      if (!ind.generator_online[g]) continue;
      if (std::abs(accel[g]) > thresholds.rocof_limit) {
        ind.generator_online[g] = 0;
        result.events.push_back({ErKind::rigs, g, t, 0});
      } else if (state.speed[g] > thresholds.over_speed) {
        ind.generator_online[g] = 0;
        result.events.push_back({ErKind::ofgs, g, t, 0});
      }
    }

    for (std::size_t i = 0; i < network.bus_count(); ++i) {
      if (i < network.generator_count && !ind.generator_online[i]) continue;
      int& stage = ind.ufls_stage[i];
      while (stage < 4 &&
             state.speed[i] < thresholds.ufls_speed[static_cast<std::size_t>(stage)]) {
        ++stage;
        result.events.push_back({ErKind::ufls, i, t, stage});
      }
    }

    bool tripped = false;
    for (std::size_t k = 0; k < network.lines.size(); ++k) {
      const auto& line = network.lines[k];
      if (!line.monitored || !ind.line_online[k]) continue;
      if (std::abs(line_flow(network, view, k)) > *line.flow_limit) {
        ind.line_online[k] = 0;
        tripped = true;
        result.events.push_back({ErKind::line_trip, k, t, 0});
      }
    }
    if (tripped) b = effective_susceptance(network, ind.line_online);
    if (result.events.size() == before) break;
  }
  return result;
}

}  // namespace laa
