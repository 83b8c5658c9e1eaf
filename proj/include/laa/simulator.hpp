#pragma once

#include "laa/grid_model.hpp"
#include "laa/protection.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

/// Newton failed to reach the residual tolerance.
class EquilibriumError : public std::runtime_error {
 public:
  EquilibriumError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct EquilibriumOptions {
  double tolerance = 1e-10;  // on the steady-state residual
  int max_iterations = 50;
  int homotopy_steps = 20;
};

struct SimConfig {
  double step = 0.005;
  double horizon = 15.0;
  std::size_t trajectory_stride = 0;  // 0 disables trajectory storage
  bool stop_at_first_event = false;   // membership queries only need the flag
  EquilibriumOptions equilibrium;
};

enum class SimStatus { completed, collapsed, numerical_fault, stopped_early };

std::string_view to_string(SimStatus status);

/// Activation counts per (kind, location). UFLS counts are stage counts.
struct ActivationCounts {
  std::vector<int> rigs;       // per bus
  std::vector<int> ofgs;       // per bus
  std::vector<int> ufls;       // per bus
  std::vector<int> line_trip;  // per line

  static ActivationCounts zeros(std::size_t buses, std::size_t lines);
  static ActivationCounts from_events(std::span<const ErEvent> events, std::size_t buses,
                                      std::size_t lines);
  bool operator==(const ActivationCounts&) const = default;
};

struct TrajectorySample {
  double time = 0.0;
  std::vector<double> speed;
  std::vector<double> voltage;
  std::vector<double> injection;
  std::vector<double> line_flow;
};

struct SimOutcome {
  std::vector<ErEvent> events;
  bool failure = false;  // at least one event, or total collapse
  SimStatus status = SimStatus::completed;
  std::string diagnostic;
  ActivationCounts counts;
  DynamicState final_state;
  double final_time = 0.0;
  std::vector<TrajectorySample> trajectory;
};

/// Steady state with governor outputs at zero and bus 1 as angle reference.
/// Damped Newton, falling back to a load homotopy. Throws EquilibriumError.
DynamicState solve_equilibrium(const NetworkModel& network, const EquilibriumOptions& options = {});

/// Infinity norm of the model derivatives at `state` with no attack.
double equilibrium_residual(const NetworkModel& network, const DynamicState& state);

/// Classical RK4 step of the continuous state; indicators are carried over.
DynamicState integrate_step(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                            const DynamicState& state, std::span<const double> eta, double h);

/// Hybrid simulation around a fixed network. The equilibrium is solved once
/// on construction; run() is const and safe to call from several threads.
class Simulator {
 public:
  Simulator(NetworkModel network, ErThresholds thresholds, SimConfig config);

  const NetworkModel& network() const { return network_; }
  const ErThresholds& thresholds() const { return thresholds_; }
  const SimConfig& config() const { return config_; }
  const DynamicState& equilibrium() const { return equilibrium_; }

  /// Applies the per-bus load change `eta` at t = 0 and integrates to the
  /// horizon, scanning protection every inspection interval. Generators in
  /// `forced_trips` are disconnected at t = 0 without an event.
  SimOutcome run(std::span<const double> eta,
                 std::span<const std::size_t> forced_trips = {}) const;

  /// Same, overriding trajectory storage and early stopping.
  SimOutcome run(std::span<const double> eta, std::span<const std::size_t> forced_trips,
                 std::size_t trajectory_stride, bool stop_at_first_event) const;

 private:
  NetworkModel network_;
  ErThresholds thresholds_;
  SimConfig config_;
  DynamicState equilibrium_;
  std::size_t inspection_steps_ = 1;
};

/// One-shot convenience wrapper around Simulator.
SimOutcome simulate(const NetworkModel& network, const ErThresholds& thresholds,
                    const SimConfig& config, std::span<const double> eta);

}  // namespace laa
