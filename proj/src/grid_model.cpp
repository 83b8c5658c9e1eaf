#include "laa/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace laa {

Eigen::MatrixXd NetworkModel::base_susceptance() const {
  const auto n = static_cast<Eigen::Index>(bus_count());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (const auto& line : lines) {
    const auto i = static_cast<Eigen::Index>(line.from);
    const auto j = static_cast<Eigen::Index>(line.to);
    b(i, j) += line.susceptance;
    b(j, i) += line.susceptance;
    b(i, i) -= line.susceptance;
    b(j, j) -= line.susceptance;
  }
  return b;
}

void NetworkModel::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("network: " + what); };
  if (generator_count == 0) fail("at least one generator bus is required");
  if (buses.size() < generator_count) fail("fewer buses than generators");
  if (generators.size() != generator_count) fail("generator parameter count mismatch");
  if (!(vulnerability >= 0.0 && vulnerability <= 1.0)) fail("vulnerability must lie in [0, 1]");
  if (!(damping >= 0.0)) fail("damping must be nonnegative");
  if (!(deadband >= 0.0)) fail("deadband must be nonnegative");
  if (!(nominal_frequency_hz > 0.0)) fail("nominal frequency must be positive");

  for (std::size_t i = 0; i < buses.size(); ++i) {
    const auto& bus = buses[i];
    std::ostringstream where;
    where << "bus " << i + 1 << " (" << bus.name << ")";
    if (!(bus.time_constant > 0.0)) fail(where.str() + ": time constant must be positive");
    if (!(bus.load >= 0.0)) fail(where.str() + ": load must be nonnegative");
    if (!(bus.reactance >= 0.0)) fail(where.str() + ": reactance must be nonnegative");
  }
  double generation = 0.0;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const auto& gen = generators[g];
    const std::string where = "generator " + std::to_string(g + 1);
    if (!(gen.inertia > 0.0)) fail(where + ": inertia must be positive");
    if (!(gen.droop >= 0.0)) fail(where + ": droop must be nonnegative");
    if (gen.p_eq > gen.p_max) fail(where + ": equilibrium output exceeds maximum");
    generation += gen.p_eq;
  }
  double load = 0.0;
  for (const auto& bus : buses) load += bus.load;
  if (std::abs(generation - load) > 1e-9 * std::max(1.0, load)) {
    std::ostringstream msg;
    msg << "lossless network requires generation (" << generation << ") to equal load (" << load
        << ")";
    fail(msg.str());
  }
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const std::string where = "line " + std::to_string(k + 1);
    if (line.from >= buses.size() || line.to >= buses.size()) fail(where + ": unknown bus");
    if (line.from == line.to) fail(where + ": self loop");
    if (!(line.susceptance > 0.0)) fail(where + ": susceptance must be positive");
    if (line.monitored && !(line.flow_limit && *line.flow_limit > 0.0))
      fail(where + ": monitored line needs a positive flow limit");
  }
}

Indicators Indicators::nominal(const NetworkModel& network) {
  Indicators ind;
  ind.generator_online.assign(network.generator_count, 1);
  ind.line_online.assign(network.lines.size(), 1);
  ind.ufls_stage.assign(network.bus_count(), 0);
  return ind;
}

Eigen::MatrixXd effective_susceptance(const NetworkModel& network,
                                      std::span<const std::uint8_t> line_online) {
  if (line_online.size() != network.lines.size())
    throw ConfigError("line indicator map does not match the line list");
  Eigen::MatrixXd b = network.base_susceptance();
  for (std::size_t k = 0; k < network.lines.size(); ++k) {
    if (line_online[k]) continue;
    const auto& line = network.lines[k];
    const auto i = static_cast<Eigen::Index>(line.from);
    const auto j = static_cast<Eigen::Index>(line.to);
    b(i, j) -= line.susceptance;
    b(j, i) -= line.susceptance;
    b(i, i) += line.susceptance;
    b(j, j) += line.susceptance;
  }
  return b;
}

double net_generation(const GeneratorParams& gen, double governor) {
  return std::min(gen.p_max, gen.p_eq + governor);
}

double net_load(double equilibrium_load, double eta, double vulnerability, int stage) {
  if (!(eta >= -1.0 && eta <= 1.0)) throw std::invalid_argument("net_load: eta outside [-1, 1]");
  if (stage < 0 || stage > 4) throw std::invalid_argument("net_load: UFLS stage outside [0, 4]");
  const double attacked = (1.0 - vulnerability) * equilibrium_load +
                          (1.0 + eta) * vulnerability * equilibrium_load;
  return (1.0 - 0.1 * stage) * attacked;
}

double line_flow(const NetworkModel& network, const DynamicState& state,
                 std::size_t line_index) {
  const auto& line = network.lines.at(line_index);
  if (!state.indicators.line_online.at(line_index)) return 0.0;
  return line.susceptance * state.voltage[line.from] * state.voltage[line.to] *
         std::sin(state.angle[line.from] - state.angle[line.to]);
}

double total_inertia(const NetworkModel& network, const Indicators& indicators) {
  double m = 0.0;
  for (std::size_t g = 0; g < network.generator_count; ++g)
    if (indicators.generator_online[g]) m += network.generators[g].inertia;
  return m;
}

double regulator_output(const GeneratorParams& gen, double voltage) {
  return gen.avr_gain * (voltage - gen.avr_setpoint);
}

namespace {

// sum_j B_ij E_j sin(d_i - d_j) and sum_j B_ij E_j cos(d_i - d_j), using
// the angle-difference identities so only 2n trig calls are needed.
void coupling_sums(const Eigen::MatrixXd& b, const DynamicState& state, std::vector<double>& sin_sum,
                   std::vector<double>& cos_sum) {
  const std::size_t n = state.angle.size();
  double s[64];
  double c[64];
  std::vector<double> s_heap;
  std::vector<double> c_heap;
  double* sp = s;
  double* cp = c;
  if (n > 64) {
    s_heap.resize(n);
    c_heap.resize(n);
    sp = s_heap.data();
    cp = c_heap.data();
  }
  for (std::size_t i = 0; i < n; ++i) {
    sp[i] = std::sin(state.angle[i]);
    cp[i] = std::cos(state.angle[i]);
  }
  sin_sum.resize(n);
  cos_sum.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0;
    double bb = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                       state.voltage[j];
      a += w * cp[j];
      bb += w * sp[j];
    }
    sin_sum[i] = sp[i] * a - cp[i] * bb;
    cos_sum[i] = cp[i] * a + sp[i] * bb;
  }
}

}  // namespace

std::vector<double> network_injection(const Eigen::MatrixXd& susceptance,
                                      const DynamicState& state) {
  std::vector<double> sin_sum;
  std::vector<double> cos_sum;
  coupling_sums(susceptance, state, sin_sum, cos_sum);
  for (std::size_t i = 0; i < sin_sum.size(); ++i) sin_sum[i] *= state.voltage[i];
  return sin_sum;
}

void derivatives_into(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                      const DynamicState& state, std::span<const double> eta,
                      StateDerivative& out) {
  const std::size_t n = network.bus_count();
  const std::size_t ng = network.generator_count;
  const double inertia = total_inertia(network, state.indicators);
  if (!(inertia > 0.0)) throw std::domain_error("derivatives: no generator connected");

  thread_local std::vector<double> sin_sum;
  thread_local std::vector<double> cos_sum;
  coupling_sums(susceptance, state, sin_sum, cos_sum);

  out.angle.resize(n);
  out.speed.resize(n);
  out.voltage.resize(n);
  out.governor.resize(ng);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bus = network.buses[i];
    const double load =
        net_load(bus.load, eta[i], network.vulnerability, state.indicators.ufls_stage[i]);
    double injection = -load - state.voltage[i] * sin_sum[i];
    double excitation = bus.field_voltage;
    if (i < ng) {
      const auto& gen = network.generators[i];
      const double online = state.indicators.generator_online[i] ? 1.0 : 0.0;
      injection += online * net_generation(gen, state.governor[i]);
      excitation = online * (bus.field_voltage - regulator_output(gen, state.voltage[i]));
    }
    out.angle[i] = state.speed[i];
    out.speed[i] = (injection - network.damping * state.speed[i]) / inertia;
    out.voltage[i] =
        (excitation - state.voltage[i] + bus.reactance * cos_sum[i]) / bus.time_constant;
  }
  for (std::size_t g = 0; g < ng; ++g) {
    const double w = state.speed[g];
    out.governor[g] = std::abs(w) <= network.deadband ? 0.0 : -network.generators[g].droop * w;
  }
}

StateDerivative derivatives(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                            const DynamicState& state, std::span<const double> eta) {
  StateDerivative out;
  derivatives_into(network, susceptance, state, eta, out);
  return out;
}

std::vector<double> rocof(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                          const DynamicState& state, std::span<const double> eta) {
  return derivatives(network, susceptance, state, eta).speed;
}

double max_abs(const StateDerivative& d) {
  double m = 0.0;
  for (const auto* v : {&d.angle, &d.speed, &d.voltage, &d.governor})
    for (double x : *v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace laa
