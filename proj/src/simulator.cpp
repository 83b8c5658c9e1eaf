#include "laa/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laa {

std::string_view to_string(SimStatus status) {
  switch (status) {
    case SimStatus::completed:
      return "completed";
    case SimStatus::collapsed:
      return "collapsed";
    case SimStatus::numerical_fault:
      return "numerical_fault";
    case SimStatus::stopped_early:
      return "stopped_early";
  }
  return "?";
}

ActivationCounts ActivationCounts::zeros(std::size_t buses, std::size_t lines) {
  ActivationCounts c;
  c.rigs.assign(buses, 0);
  c.ofgs.assign(buses, 0);
  c.ufls.assign(buses, 0);
  c.line_trip.assign(lines, 0);
  return c;
}

ActivationCounts ActivationCounts::from_events(std::span<const ErEvent> events, std::size_t buses,
                                               std::size_t lines) {
  auto c = zeros(buses, lines);
  for (const auto& e : events) {
    switch (e.kind) {
      case ErKind::rigs:
        ++c.rigs.at(e.location);
        break;
      case ErKind::ofgs:
        ++c.ofgs.at(e.location);
        break;
      case ErKind::ufls:
        ++c.ufls.at(e.location);
        break;
      case ErKind::line_trip:
        ++c.line_trip.at(e.location);
        break;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Equilibrium

namespace {

// Steady-state residual and Jacobian in the unknowns
// [angle_1 .. angle_{n-1}, voltage_0 .. voltage_{n-1}], angle_0 pinned to 0.
// Injections and loads are scaled by `lambda` for the homotopy fallback.
struct SteadyStateSystem {
  const NetworkModel& network;
  Eigen::MatrixXd b;
  double lambda = 1.0;

  std::size_t n() const { return network.bus_count(); }

  void unpack(const Eigen::VectorXd& x, std::vector<double>& angle,
              std::vector<double>& voltage) const {
    const std::size_t nb = n();
    angle.assign(nb, 0.0);
    voltage.assign(nb, 0.0);
    for (std::size_t i = 1; i < nb; ++i) angle[i] = x(static_cast<Eigen::Index>(i - 1));
    for (std::size_t i = 0; i < nb; ++i) voltage[i] = x(static_cast<Eigen::Index>(nb - 1 + i));
  }

  double excitation(std::size_t i, double v) const {
    const auto& bus = network.buses[i];
    if (!network.is_generator(i)) return bus.field_voltage;
    return bus.field_voltage - regulator_output(network.generators[i], v);
  }

  double excitation_slope(std::size_t i) const {
    return network.is_generator(i) ? -network.generators[i].avr_gain : 0.0;
  }

  double balance_target(std::size_t i) const {
    double p = -network.buses[i].load;
    if (network.is_generator(i)) p += network.generators[i].p_eq;
    return lambda * p;
  }

  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const std::size_t nb = n();
    std::vector<double> d;
    std::vector<double> e;
    unpack(x, d, e);
    const auto m = static_cast<Eigen::Index>(2 * nb - 1);
    r.resize(m);
    if (jac) jac->setZero(m, m);
    auto angle_col = [](std::size_t k) { return static_cast<Eigen::Index>(k - 1); };
    auto volt_col = [nb](std::size_t k) { return static_cast<Eigen::Index>(nb - 1 + k); };

    for (std::size_t i = 0; i < nb; ++i) {
      double sin_sum = 0.0;
      double cos_sum = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const double bij = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        sin_sum += bij * e[j] * std::sin(d[i] - d[j]);
        cos_sum += bij * e[j] * std::cos(d[i] - d[j]);
      }
      // active power balance (bus 0 is implied by the others)
      if (i > 0) {
        const auto row = angle_col(i);
        r(row) = balance_target(i) - e[i] * sin_sum;
        if (jac) {
          for (std::size_t k = 0; k < nb; ++k) {
            const double bik = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            if (k != i) {
              const double dd = d[i] - d[k];
              if (k > 0) (*jac)(row, angle_col(k)) += e[i] * bik * e[k] * std::cos(dd);
              (*jac)(row, angle_col(i)) -= e[i] * bik * e[k] * std::cos(dd);
              (*jac)(row, volt_col(k)) = -e[i] * bik * std::sin(dd);
            }
          }
          (*jac)(row, volt_col(i)) = -sin_sum;
        }
      }
      // voltage equation
      const auto& bus = network.buses[i];
      const auto row = static_cast<Eigen::Index>(nb - 1 + i);
      r(row) = excitation(i, e[i]) - e[i] + bus.reactance * cos_sum;
      if (jac) {
        for (std::size_t k = 0; k < nb; ++k) {
          const double bik = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
          if (k == i) {
            (*jac)(row, volt_col(i)) += excitation_slope(i) - 1.0 + bus.reactance * bik;
          } else {
            const double dd = d[i] - d[k];
            (*jac)(row, volt_col(k)) += bus.reactance * bik * std::cos(dd);
            if (k > 0) (*jac)(row, angle_col(k)) += bus.reactance * bik * e[k] * std::sin(dd);
            if (i > 0) (*jac)(row, angle_col(i)) -= bus.reactance * bik * e[k] * std::sin(dd);
          }
        }
      }
    }
  }
};

// Damped Newton; returns the final residual infinity norm.
double newton(const SteadyStateSystem& sys, Eigen::VectorXd& x, const EquilibriumOptions& opt) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  sys.evaluate(x, r, &jac);
  double norm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < opt.max_iterations && norm > opt.tolerance; ++it) {
    const Eigen::VectorXd dx = jac.partialPivLu().solve(-r);
    if (!dx.allFinite()) break;
    double step = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd r_trial;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      trial = x + step * dx;
      sys.evaluate(trial, r_trial, nullptr);
      const double trial_norm = r_trial.lpNorm<Eigen::Infinity>();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    x = trial;
    sys.evaluate(x, r, &jac);
    norm = r.lpNorm<Eigen::Infinity>();
  }
  return norm;
}

}  // namespace

DynamicState solve_equilibrium(const NetworkModel& network, const EquilibriumOptions& options) {
  network.validate();
  const std::size_t nb = network.bus_count();
  SteadyStateSystem sys{network, network.base_susceptance(), 1.0};

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * nb - 1));
  for (std::size_t i = 0; i < nb; ++i)
    x0(static_cast<Eigen::Index>(nb - 1 + i)) = std::max(network.buses[i].field_voltage, 0.5);

  Eigen::VectorXd x = x0;
  double residual = newton(sys, x, options);
  if (!(residual <= options.tolerance)) {
    x = x0;
    for (int k = 1; k <= options.homotopy_steps; ++k) {
      sys.lambda = static_cast<double>(k) / options.homotopy_steps;
      residual = newton(sys, x, options);
    }
  }
  if (!(residual <= options.tolerance)) {
    std::ostringstream msg;
    msg << "equilibrium did not converge, residual " << residual;
    throw EquilibriumError(msg.str(), residual);
  }

  DynamicState state;
  sys.unpack(x, state.angle, state.voltage);
  state.speed.assign(nb, 0.0);
  state.governor.assign(network.generator_count, 0.0);
  state.indicators = Indicators::nominal(network);
  for (double v : state.voltage)
    if (!(v > 0.0)) throw EquilibriumError("equilibrium has a nonpositive voltage", residual);
  return state;
}

double equilibrium_residual(const NetworkModel& network, const DynamicState& state) {
  const std::vector<double> eta(network.bus_count(), 0.0);
  return max_abs(derivatives(network, network.base_susceptance(), state, eta));
}

// ---------------------------------------------------------------------------
// Integration

namespace {

struct Rk4Workspace {
  StateDerivative k1, k2, k3, k4;
  DynamicState stage;
};

void axpy_state(const DynamicState& base, const StateDerivative& k, double a, DynamicState& out) {
  auto combine = [a](const std::vector<double>& x, const std::vector<double>& dx,
                     std::vector<double>& y) {
    y.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * dx[i];
  };
  combine(base.angle, k.angle, out.angle);
  combine(base.speed, k.speed, out.speed);
  combine(base.voltage, k.voltage, out.voltage);
  combine(base.governor, k.governor, out.governor);
}

void rk4_step(const NetworkModel& network, const Eigen::MatrixXd& b, DynamicState& state,
              std::span<const double> eta, double h, Rk4Workspace& ws) {
  ws.stage.indicators = state.indicators;
  derivatives_into(network, b, state, eta, ws.k1);
  axpy_state(state, ws.k1, 0.5 * h, ws.stage);
  derivatives_into(network, b, ws.stage, eta, ws.k2);
  axpy_state(state, ws.k2, 0.5 * h, ws.stage);
  derivatives_into(network, b, ws.stage, eta, ws.k3);
  axpy_state(state, ws.k3, h, ws.stage);
  derivatives_into(network, b, ws.stage, eta, ws.k4);

  auto update = [h](std::vector<double>& x, const std::vector<double>& a,
                    const std::vector<double>& b2, const std::vector<double>& c,
                    const std::vector<double>& d) {
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += h / 6.0 * (a[i] + 2.0 * b2[i] + 2.0 * c[i] + d[i]);
  };
  update(state.angle, ws.k1.angle, ws.k2.angle, ws.k3.angle, ws.k4.angle);
  update(state.speed, ws.k1.speed, ws.k2.speed, ws.k3.speed, ws.k4.speed);
  update(state.voltage, ws.k1.voltage, ws.k2.voltage, ws.k3.voltage, ws.k4.voltage);
  update(state.governor, ws.k1.governor, ws.k2.governor, ws.k3.governor, ws.k4.governor);
}

bool all_finite(const DynamicState& s) {
  for (const auto* v : {&s.angle, &s.speed, &s.voltage, &s.governor})
    for (double x : *v)
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

DynamicState integrate_step(const NetworkModel& network, const Eigen::MatrixXd& susceptance,
                            const DynamicState& state, std::span<const double> eta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate_step: step must be positive");
  Rk4Workspace ws;
  DynamicState next = state;
  rk4_step(network, susceptance, next, eta, h, ws);
  return next;
}

// ---------------------------------------------------------------------------
// Hybrid loop

Simulator::Simulator(NetworkModel network, ErThresholds thresholds, SimConfig config)
    : network_(std::move(network)), thresholds_(thresholds), config_(config) {
  if (!(config_.step > 0.0)) throw ConfigError("simulation: step must be positive");
  if (!(config_.horizon > 0.0)) throw ConfigError("simulation: horizon must be positive");
  const double interval =
      thresholds_.inspection_interval > 0.0 ? thresholds_.inspection_interval : config_.step;
  const double ratio = interval / config_.step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("simulation: inspection interval must be a multiple of the step");
  inspection_steps_ = static_cast<std::size_t>(rounded);
  equilibrium_ = solve_equilibrium(network_, config_.equilibrium);
}

SimOutcome Simulator::run(std::span<const double> eta,
                          std::span<const std::size_t> forced_trips) const {
  return run(eta, forced_trips, config_.trajectory_stride, config_.stop_at_first_event);
}

SimOutcome Simulator::run(std::span<const double> eta, std::span<const std::size_t> forced_trips,
                          std::size_t trajectory_stride, bool stop_at_first_event) const {
  const std::size_t nb = network_.bus_count();
  if (eta.size() != nb) throw std::invalid_argument("simulate: attack dimension mismatch");
  for (double x : eta)
    if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("simulate: eta outside [-1, 1]");

  SimOutcome out;
  DynamicState state = equilibrium_;
  for (std::size_t g : forced_trips) state.indicators.generator_online.at(g) = 0;
  Eigen::MatrixXd b = effective_susceptance(network_, state.indicators.line_online);

  auto record = [&](double t) {
    TrajectorySample s;
    s.time = t;
    s.speed = state.speed;
    s.voltage = state.voltage;
    s.injection = network_injection(b, state);
    s.line_flow.resize(network_.lines.size());
    for (std::size_t k = 0; k < network_.lines.size(); ++k)
      s.line_flow[k] = line_flow(network_, state, k);
    out.trajectory.push_back(std::move(s));
  };

  const auto steps = static_cast<std::size_t>(std::llround(config_.horizon / config_.step));
  const double h = config_.step;
  Rk4Workspace ws;
  double t = 0.0;

  if (total_inertia(network_, state.indicators) <= 0.0) {
    out.status = SimStatus::collapsed;
    out.diagnostic = "no generator connected at t = 0";
  } else {
    if (trajectory_stride > 0) record(0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
      rk4_step(network_, b, state, eta, h, ws);
      t = static_cast<double>(k) * h;
      if (!all_finite(state)) {
        out.status = SimStatus::numerical_fault;
        std::ostringstream msg;
        msg << "non-finite state at t = " << t;
        out.diagnostic = msg.str();
        break;
      }
      if (k % inspection_steps_ == 0) {
        auto scan = inspect(network_, thresholds_, b, state, eta, t);
        if (!scan.events.empty()) {
          const bool lines_changed = scan.indicators.line_online != state.indicators.line_online;
          state.indicators = std::move(scan.indicators);
          out.events.insert(out.events.end(), scan.events.begin(), scan.events.end());
          if (lines_changed) b = effective_susceptance(network_, state.indicators.line_online);
          if (total_inertia(network_, state.indicators) <= 0.0) {
            out.status = SimStatus::collapsed;
            out.diagnostic = "all generators disconnected";
            break;
          }
          if (stop_at_first_event) {
            out.status = SimStatus::stopped_early;
            break;
          }
        }
      }
      if (trajectory_stride > 0 && k % trajectory_stride == 0) record(t);
    }
  }

  out.final_time = t;
  out.failure = !out.events.empty() || out.status == SimStatus::collapsed;
  out.counts = ActivationCounts::from_events(out.events, nb, network_.lines.size());
  out.final_state = std::move(state);
  return out;
}

SimOutcome simulate(const NetworkModel& network, const ErThresholds& thresholds,
                    const SimConfig& config, std::span<const double> eta) {
  return Simulator(network, thresholds, config).run(eta);
}

}  // namespace laa
