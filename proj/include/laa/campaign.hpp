#pragma once

#include "laa/attack_model.hpp"
#include "laa/config.hpp"
#include "laa/sampler.hpp"
#include "laa/simulator.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

/// No member of C could be located to start a chain.
class InitialStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampler's view of the attack problem. Chain coordinates are either
/// the standardized coordinates of the attack density or raw attacks.
struct AttackTarget {
  SamplingTarget target;
  std::function<std::vector<double>(std::span<const double>)> to_attack;
  std::function<std::vector<double>(std::span<const double>)> from_attack;
};

AttackTarget make_attack_target(const Simulator& simulator, const DensityParams& density,
                                ProposalSpace space);

struct InitialState {
  std::vector<double> attack;
  SimOutcome outcome;
  std::string strategy;
};

/// Finds u_1 in C: a supplied attack, then the saturated all-increase attack,
/// then decrease-in-exporting-areas / increase-in-importing-areas, then draws
/// from the attack density (in parallel batches) up to `budget` simulations.
InitialState initial_state(const Simulator& simulator, const DensityParams& density,
                           const std::optional<std::vector<double>>& supplied, std::size_t budget,
                           std::uint64_t seed);

ProposalConfig make_proposal_config(const SamplerSettings& settings, std::size_t dimension);

struct CampaignResult {
  InitialState initial;
  ChainResult chain;
  std::vector<std::vector<double>> attacks;  // u for every record
  std::vector<std::vector<double>> realized; // u clipped to attacker authority
};

/// Runs a complete chain for a configuration.
CampaignResult run_campaign(const CampaignConfig& config);
CampaignResult run_campaign(const CampaignConfig& config, const Simulator& simulator);

/// Continues an aborted campaign. Only the rounds after the checkpoint are
/// returned; `initial` is left empty.
CampaignResult resume_campaign(const CampaignConfig& config, const Simulator& simulator,
                               const ChainCheckpoint& checkpoint);

/// Attaches u and realized u to every chain record.
void attach_attacks(CampaignResult& result, const AttackTarget& target,
                    const NetworkModel& network);

/// Derives independent 64-bit seeds from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace laa
