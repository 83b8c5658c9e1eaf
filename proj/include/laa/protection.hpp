#pragma once

#include "laa/grid_model.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace laa {

/// Emergency-response kinds, numbered as in the failure-rate tables
/// (1 RIGS, 2 OFGS, 3 UFLS, 4 line trip).
enum class ErKind { rigs = 1, ofgs = 2, ufls = 3, line_trip = 4 };

std::string_view to_string(ErKind kind);
ErKind er_kind_from_string(std::string_view name);

struct ErEvent {
  ErKind kind = ErKind::rigs;
  std::size_t location = 0;  // bus index, or line index for line trips
  double time = 0.0;
  int stage = 0;  // UFLS stage 1..4, zero otherwise

  bool operator==(const ErEvent&) const = default;
};

/// Protection settings in model units. Build from Hz values with from_hz().
struct ErThresholds {
  double rocof_limit = 0.0;                // rad/s^2, RIGS
  double over_speed = 0.0;                 // rad/s above nominal, OFGS
  std::array<double, 4> ufls_speed{};      // rad/s deviations, strictly decreasing
  double inspection_interval = 0.0;        // s; zero means "every integrator step"

  /// Converts frequency settings given in Hz (absolute over/under-frequency
  /// levels, RoCoF in Hz/s) into speed deviations. Throws ConfigError when
  /// the stages are not strictly decreasing or a limit is not positive.
  static ErThresholds from_hz(double nominal_hz, double rocof_hz_per_s, double over_frequency_hz,
                              const std::array<double, 4>& ufls_hz, double inspection_interval);
};

struct Inspection {
  Indicators indicators;
  std::vector<ErEvent> events;
};

/// One protection scan at time t over the continuous state as given.
/// A generator caught by both RIGS and OFGS in one scan is reported once, as
/// RIGS. Every UFLS stage crossed since the last scan fires; relays at the bus
/// of a disconnected generator are skipped. Actions taken
/// during the scan feed back into RoCoF and flows and the scan repeats until
/// no further action is triggered, so a second scan of the result is a no-op.
/// `susceptance` must equal B(Omega) for the incoming indicators.
Inspection inspect(const NetworkModel& network, const ErThresholds& thresholds,
                   const Eigen::MatrixXd& susceptance, const DynamicState& state,
                   std::span<const double> eta, double t);

}  // namespace laa
