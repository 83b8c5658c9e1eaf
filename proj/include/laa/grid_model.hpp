#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

/// Raised for malformed or inconsistent network / campaign configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Line {
  std::size_t from = 0;  // 0-based bus index
  std::size_t to = 0;
  double susceptance = 0.0;  // p.u., positive for an inductive branch
  bool monitored = false;
  std::optional<double> flow_limit;  // p.u.; only meaningful when monitored
};

struct GeneratorParams {
  double inertia = 0.0;   // H_i
  double droop = 0.0;     // A_i, governor response per rad/s of speed error
  double p_max = 0.0;     // nominal maximum output, p.u.
  double p_eq = 0.0;      // equilibrium output, p.u.
  double avr_gain = 0.0;  // proportional voltage regulator gain; 0 disables it
  double avr_setpoint = 1.0;
};

/// Per-bus quantities. The voltage-equation parameters exist at load buses
/// as well as generator buses.
struct BusParams {
  std::string name;
  int area = 1;
  double time_constant = 1.0;  // S_i, s
  double reactance = 0.0;      // X_i
  double field_voltage = 1.0;  // E_f,i
  double load = 0.0;           // equilibrium load P^L_i, p.u.
};

/// Static description of a lossless grid. Buses [0, generator_count) are
/// generator buses, the remainder are load buses.
struct NetworkModel {
  std::size_t generator_count = 0;
  std::vector<BusParams> buses;
  std::vector<GeneratorParams> generators;
  std::vector<Line> lines;
  double damping = 0.0;
  double deadband = 0.0;  // governor deadband half-width, rad/s
  double vulnerability = 0.0;
  double nominal_frequency_hz = 50.0;

  std::size_t bus_count() const { return buses.size(); }
  std::size_t load_count() const { return buses.size() - generator_count; }
  bool is_generator(std::size_t bus) const { return bus < generator_count; }

  /// B^0 assembled from the line list: off-diagonals hold the line
  /// susceptance, diagonals the negated row sum.
  Eigen::MatrixXd base_susceptance() const;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Discrete indicators: generator connected, line connected, UFLS stage.
struct Indicators {
  std::vector<std::uint8_t> generator_online;
  std::vector<std::uint8_t> line_online;
  std::vector<int> ufls_stage;

  static Indicators nominal(const NetworkModel& network);
  bool operator==(const Indicators&) const = default;
};

/// Continuous state plus indicators. `speed` is the angular frequency
/// deviation from nominal in rad/s; `governor` is indexed by generator.
struct DynamicState {
  std::vector<double> angle;
  std::vector<double> speed;
  std::vector<double> voltage;
  std::vector<double> governor;
  Indicators indicators;
};

struct StateDerivative {
  std::vector<double> angle;
  std::vector<double> speed;  // RoCoF, rad/s^2
  std::vector<double> voltage;
  std::vector<double> governor;
};

/// B(Omega): base susceptance with tripped lines removed, including their
/// contribution to both endpoint diagonals.
Eigen::MatrixXd effective_susceptance(const NetworkModel& network,
                                      std::span<const std::uint8_t> line_online);

double net_generation(const GeneratorParams& gen, double governor);

/// (1 - 0.1 R) ((1 - nu) P^L + (1 + eta) nu P^L). Throws std::invalid_argument
/// for eta outside [-1, 1] or a stage outside [0, 4].
double net_load(double equilibrium_load, double eta, double vulnerability, int stage);

/// B_ij E_i E_j sin(delta_i - delta_j) for line `line_index`, zero once the
/// line has been tripped.
double line_flow(const NetworkModel& network, const DynamicState& state,
                 std::size_t line_index);

/// M(psi), the summed inertia of connected generators.
double total_inertia(const NetworkModel& network, const Indicators& indicators);

/// AVR output v_i for generator `gen` at terminal voltage `voltage`.
double regulator_output(const GeneratorParams& gen, double voltage);

/// Electrical power each bus pushes into the network,
/// E_i sum_j B_ij E_j sin(delta_i - delta_j).
std::vector<double> network_injection(const Eigen::MatrixXd& susceptance,
                                      const DynamicState& state);

/// Right-hand side of the third-order swing/voltage/governor model.
/// `eta` holds the per-bus proportional change of vulnerable load.
/// Throws std::domain_error when no generator is connected (M = 0).
StateDerivative derivatives(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                            const DynamicState& state, std::span<const double> eta);

/// Same as above, writing into preallocated storage.
void derivatives_into(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                      const DynamicState& state, std::span<const double> eta,
                      StateDerivative& out);

std::vector<double> rocof(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                          const DynamicState& state, std::span<const double> eta);

/// Infinity norm over every component of a derivative.
double max_abs(const StateDerivative& d);

}  // namespace laa
