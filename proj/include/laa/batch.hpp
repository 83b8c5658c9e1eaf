#pragma once

#include "laa/simulator.hpp"

#include <span>
#include <vector>

namespace laa {

/// One independent simulation request.
struct Scenario {
  std::vector<double> eta;
  std::vector<std::size_t> forced_trips;
  bool stop_at_first_event = false;
};

// Batch evaluation of independent scenarios. run_batch_serial is the
// reference; run_batch distributes scenarios over OpenMP threads and must
// produce bit-identical outcomes in the same order.

std::vector<SimOutcome> run_batch_serial(const Simulator& simulator,
                                         std::span<const Scenario> scenarios);

std::vector<SimOutcome> run_batch(const Simulator& simulator, std::span<const Scenario> scenarios,
                                  int threads = 0);

/// Failure flags of attack vectors u (not eta), evaluated in parallel.
std::vector<bool> indicator_batch(const Simulator& simulator,
                                  std::span<const std::vector<double>> attacks, int threads = 0);

}  // namespace laa
