#pragma once

#include "laa/simulator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

enum class HaltingLaw { constant, geometric };

/// Settings of the skipping sampler. The proposal is a Gaussian random walk
/// with per-coordinate standard deviation `step_scale`.
struct ProposalConfig {
  std::vector<double> step_scale;
  std::size_t halting_max = 40;
  HaltingLaw halting_law = HaltingLaw::constant;
  double halting_probability = 0.1;  // success probability of the geometric law
  std::size_t proposal_count = 0;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;

  void validate(std::size_t dimension) const;
};

struct OracleResult {
  bool member = false;
  std::optional<SimOutcome> outcome;
};

/// Membership test for the rare set C, in chain coordinates.
using MembershipOracle = std::function<OracleResult(std::span<const double>)>;

/// pi(x) up to the constant rho(C): reference density times 1_C.
struct SamplingTarget {
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> log_reference;
  MembershipOracle oracle;
};

struct SkipResult {
  std::vector<double> point;
  OracleResult result;
  std::size_t increments = 0;    // number of skips taken
  std::size_t oracle_calls = 0;  // never exceeds the halting index
};

/// Skips from `first` along the ray current -> first until the oracle reports
/// membership or `halting` points have been examined. `draw_increment`
/// supplies the distance increments.
SkipResult skip_phase(std::span<const double> current, std::span<const double> first,
                      std::size_t halting, const MembershipOracle& oracle,
                      const std::function<double()>& draw_increment);

/// min(1, pi(z)/pi(u)) from log-target values; 1 when pi(u) = 0.
double acceptance_probability(double log_target_current, double log_target_proposal);

/// Distance increment for a diagonal Gaussian proposal along `direction`:
/// chi_d / sqrt(sum_i direction_i^2 / scale_i^2).
double draw_gaussian_increment(std::span<const double> direction, std::span<const double> scale,
                               std::mt19937_64& rng);

struct ChainRecord {
  std::size_t round = 0;  // 0 is the initial state
  std::vector<double> state;
  bool accepted = false;
  std::size_t skips = 0;
  std::size_t oracle_calls = 0;
  std::optional<SimOutcome> outcome;
};

struct ChainDiagnostics {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;
  std::size_t total_oracle_calls = 0;
  std::vector<std::size_t> oracle_calls_per_round;
  double wall_seconds = 0.0;
};

struct ChainResult {
  std::vector<ChainRecord> records;
  ChainDiagnostics diagnostics;
};

/// Where to pick a chain back up after an oracle failure.
struct ChainCheckpoint {
  std::size_t next_round = 1;
  std::vector<double> state;
  std::string rng_state;
  ChainDiagnostics diagnostics;
};

/// Thrown when the oracle fails mid-chain. Carries the records produced so
/// far and a checkpoint from which run_chain can resume.
class ChainAborted : public std::runtime_error {
 public:
  ChainAborted(const std::string& what, ChainResult partial, ChainCheckpoint checkpoint)
      : std::runtime_error(what), partial_(std::move(partial)), checkpoint_(std::move(checkpoint)) {}
  const ChainResult& partial() const { return partial_; }
  const ChainCheckpoint& checkpoint() const { return checkpoint_; }

 private:
  ChainResult partial_;
  ChainCheckpoint checkpoint_;
};

/// Runs the skipping sampler from `initial` (whose oracle result is
/// `initial_result`). Rejected rounds repeat the current state. With burn-in
/// or thinning, only kept rounds are returned; diagnostics cover all rounds.
ChainResult run_chain(const SamplingTarget& target, std::vector<double> initial,
                      OracleResult initial_result, const ProposalConfig& config);

/// Resumes an aborted chain. Records are numbered from the checkpoint round.
ChainResult resume_chain(const SamplingTarget& target, const ChainCheckpoint& checkpoint,
                         const ProposalConfig& config);

}  // namespace laa
