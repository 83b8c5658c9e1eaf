#include "laa/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace laa {

void ProposalConfig::validate(std::size_t dimension) const {
  if (step_scale.size() != dimension)
    throw std::invalid_argument("sampler: step scale dimension mismatch");
  for (double s : step_scale)
    if (!(s > 0.0)) throw std::invalid_argument("sampler: step scale must be positive");
  if (halting_max < 1) throw std::invalid_argument("sampler: halting_max must be at least 1");
  if (halting_law == HaltingLaw::geometric &&
      !(halting_probability > 0.0 && halting_probability <= 1.0))
    throw std::invalid_argument("sampler: geometric halting probability must lie in (0, 1]");
  if (thin < 1) throw std::invalid_argument("sampler: thin must be at least 1");
}

SkipResult skip_phase(std::span<const double> current, std::span<const double> first,
                      std::size_t halting, const MembershipOracle& oracle,
                      const std::function<double()>& draw_increment) {
  const std::size_t d = current.size();
  std::vector<double> direction(d);
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    direction[i] = first[i] - current[i];
    norm += direction[i] * direction[i];
  }
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("skip_phase: proposal equals current state");
  for (double& x : direction) x /= norm;

  SkipResult out;
  out.point.assign(first.begin(), first.end());
  out.result = oracle(out.point);
  out.oracle_calls = 1;
  for (std::size_t k = 1; !out.result.member && k < halting; ++k) {
    const double r = draw_increment();
    for (std::size_t i = 0; i < d; ++i) out.point[i] += direction[i] * r;
    out.result = oracle(out.point);
    ++out.oracle_calls;
    ++out.increments;
  }
  return out;
}

double acceptance_probability(double log_target_current, double log_target_proposal) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (log_target_current == ninf) return 1.0;
  if (log_target_proposal == ninf) return 0.0;
  const double log_ratio = log_target_proposal - log_target_current;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double draw_gaussian_increment(std::span<const double> direction, std::span<const double> scale,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  double chi2 = 0.0;
  double precision = 0.0;
  for (std::size_t i = 0; i < direction.size(); ++i) {
    const double z = normal(rng);
    chi2 += z * z;
    precision += direction[i] * direction[i] / (scale[i] * scale[i]);
  }
  return std::sqrt(chi2 / precision);
}

namespace {

struct ChainState {
  std::vector<double> point;
  OracleResult result;
  double log_target = 0.0;
};

double log_target(const SamplingTarget& target, std::span<const double> x, bool member) {
  if (!member) return -std::numeric_limits<double>::infinity();
  return target.log_reference(x);
}

bool kept(std::size_t round, const ProposalConfig& config) {
  if (round < config.burn_in) return false;
  if (round == 0) return true;
  return (round - config.burn_in) % config.thin == 0;
}

ChainResult advance(const SamplingTarget& target, ChainState current, std::mt19937_64 rng,
                    const ProposalConfig& config, std::size_t first_round,
                    ChainDiagnostics diagnostics, ChainResult result) {
  const auto start = std::chrono::steady_clock::now();
  const double elapsed_before = diagnostics.wall_seconds;
  const std::size_t d = target.dimension;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::geometric_distribution<std::size_t> geometric(config.halting_probability);

  for (std::size_t round = first_round; round <= config.proposal_count; ++round) {
    const std::mt19937_64 rng_at_round = rng;
    try {
      std::vector<double> first(d);
      for (std::size_t i = 0; i < d; ++i)
        first[i] = current.point[i] + config.step_scale[i] * normal(rng);
      std::size_t halting = config.halting_max;
      if (config.halting_law == HaltingLaw::geometric)
        halting = std::min<std::size_t>(config.halting_max, 1 + geometric(rng));

      std::vector<double> direction(d);
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        direction[i] = first[i] - current.point[i];
        norm += direction[i] * direction[i];
      }
      norm = std::sqrt(norm);
      for (double& x : direction) x /= norm;

      auto skip = skip_phase(current.point, first, halting, target.oracle, [&] {
        return draw_gaussian_increment(direction, config.step_scale, rng);
      });
      const double lp = log_target(target, skip.point, skip.result.member);
      const double alpha = acceptance_probability(current.log_target, lp);
      const bool accept = uniform(rng) <= alpha;

      ++diagnostics.proposals;
      diagnostics.total_oracle_calls += skip.oracle_calls;
      diagnostics.oracle_calls_per_round.push_back(skip.oracle_calls);
      if (accept) {
        ++diagnostics.accepted;
        current.point = std::move(skip.point);
        current.result = std::move(skip.result);
        current.log_target = lp;
      }
      if (kept(round, config)) {
        result.records.push_back(ChainRecord{round, current.point, accept, skip.increments,
                                             skip.oracle_calls, current.result.outcome});
      }
    } catch (const std::exception& e) {
      ChainCheckpoint checkpoint;
      checkpoint.next_round = round;
      checkpoint.state = current.point;
      std::ostringstream engine;
      engine << rng_at_round;
      checkpoint.rng_state = engine.str();
      diagnostics.wall_seconds =
          elapsed_before +
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      diagnostics.acceptance_rate =
          diagnostics.proposals ? static_cast<double>(diagnostics.accepted) / diagnostics.proposals
                                : 0.0;
      checkpoint.diagnostics = diagnostics;
      result.diagnostics = diagnostics;
      std::ostringstream msg;
      msg << "oracle failed in round " << round << ": " << e.what();
      throw ChainAborted(msg.str(), std::move(result), std::move(checkpoint));
    }
  }

  diagnostics.wall_seconds =
      elapsed_before +
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  diagnostics.acceptance_rate =
      diagnostics.proposals
          ? static_cast<double>(diagnostics.accepted) / static_cast<double>(diagnostics.proposals)
          : 0.0;
  result.diagnostics = std::move(diagnostics);
  return result;
}

}  // namespace

ChainResult run_chain(const SamplingTarget& target, std::vector<double> initial,
                      OracleResult initial_result, const ProposalConfig& config) {
  if (initial.size() != target.dimension)
    throw std::invalid_argument("run_chain: initial state dimension mismatch");
  config.validate(target.dimension);

  ChainState current;
  current.log_target = log_target(target, initial, initial_result.member);
  current.point = std::move(initial);
  current.result = std::move(initial_result);

  ChainResult result;
  if (kept(0, config))
    result.records.push_back(ChainRecord{0, current.point, true, 0, 0, current.result.outcome});
  return advance(target, std::move(current), std::mt19937_64(config.seed), config, 1, {},
                 std::move(result));
}

ChainResult resume_chain(const SamplingTarget& target, const ChainCheckpoint& checkpoint,
                         const ProposalConfig& config) {
  config.validate(target.dimension);
  std::mt19937_64 rng;
  std::istringstream engine(checkpoint.rng_state);
  engine >> rng;
  if (!engine) throw std::invalid_argument("resume_chain: corrupt generator state");

  ChainState current;
  current.point = checkpoint.state;
  current.result = target.oracle(current.point);
  current.log_target = log_target(target, current.point, current.result.member);
  return advance(target, std::move(current), rng, config, checkpoint.next_round,
                 checkpoint.diagnostics, {});
}

}  // namespace laa
