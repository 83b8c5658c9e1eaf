#include "laa/batch.hpp"

#include "laa/attack_model.hpp"

#include <omp.h>

#include <exception>

namespace laa {

namespace {

SimOutcome run_one(const Simulator& simulator, const Scenario& s) {
  return simulator.run(s.eta, s.forced_trips, simulator.config().trajectory_stride,
                       s.stop_at_first_event || simulator.config().stop_at_first_event);
}

}  // namespace

std::vector<SimOutcome> run_batch_serial(const Simulator& simulator,
                                         std::span<const Scenario> scenarios) {
  std::vector<SimOutcome> out;
  out.reserve(scenarios.size());
  for (const auto& s : scenarios) out.push_back(run_one(simulator, s));
  return out;
}

std::vector<SimOutcome> run_batch(const Simulator& simulator, std::span<const Scenario> scenarios,
                                  int threads) {
  std::vector<SimOutcome> out(scenarios.size());
  const auto n = static_cast<long>(scenarios.size());
  std::exception_ptr error;
  const int team = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (long i = 0; i < n; ++i) {
    try {
      const auto& s = scenarios[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = run_one(simulator, s);
    } catch (...) {
#pragma omp critical(laa_batch_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<bool> indicator_batch(const Simulator& simulator,
                                  std::span<const std::vector<double>> attacks, int threads) {
  std::vector<Scenario> scenarios;
  scenarios.reserve(attacks.size());
  for (const auto& u : attacks) scenarios.push_back({effective_attack(u, simulator.network()), {}, true});
  const auto outcomes = run_batch(simulator, scenarios, threads);
  std::vector<bool> flags(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) flags[i] = outcomes[i].failure;
  return flags;
}

}  // namespace laa
