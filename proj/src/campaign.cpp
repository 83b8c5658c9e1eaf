#include "laa/campaign.hpp"

#include "laa/batch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace laa {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 over (base, stream)
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

AttackTarget make_attack_target(const Simulator& simulator, const DensityParams& density,
                                ProposalSpace space) {
  const std::size_t n = simulator.network().bus_count();
  if (density.dimension() != n) throw ConfigError("density dimension does not match the network");

  AttackTarget at;
  at.target.dimension = n;
  if (space == ProposalSpace::standardized) {
    at.to_attack = [density](std::span<const double> y) { return attack_from_standard(y, density); };
    at.from_attack = [density](std::span<const double> u) {
      return standard_from_attack(u, density);
    };
    at.target.log_reference = [](std::span<const double> y) {
      return standard_normal_log_density(y);
    };
  } else {
    at.to_attack = [](std::span<const double> u) { return std::vector<double>(u.begin(), u.end()); };
    at.from_attack = at.to_attack;
    at.target.log_reference = [density](std::span<const double> u) {
      return log_density(u, density);
    };
  }
  at.target.oracle = [&simulator, to_attack = at.to_attack](std::span<const double> x) {
    const auto u = to_attack(x);
    auto outcome = evaluate_attack(u, simulator);
    if (outcome.status == SimStatus::numerical_fault)
      throw std::runtime_error("simulation fault: " + outcome.diagnostic);
    OracleResult r;
    r.member = outcome.failure;
    r.outcome = std::move(outcome);
    return r;
  };
  return at;
}

namespace {

std::vector<double> median_attack(const DensityParams& density) {
  std::vector<double> u(density.dimension());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(density.mu[i]);
  return u;
}

std::optional<InitialState> try_attack(const Simulator& simulator, std::vector<double> u,
                                       const std::string& strategy) {
  auto outcome = evaluate_attack(u, simulator);
  if (!outcome.failure) return std::nullopt;
  return InitialState{std::move(u), std::move(outcome), strategy};
}

}  // namespace

InitialState initial_state(const Simulator& simulator, const DensityParams& density,
                           const std::optional<std::vector<double>>& supplied, std::size_t budget,
                           std::uint64_t seed) {
  const auto& net = simulator.network();
  const std::size_t n = net.bus_count();

  if (supplied) {
    if (supplied->size() != n) throw InitialStateError("supplied initial attack has wrong dimension");
    if (auto s = try_attack(simulator, *supplied, "supplied")) return *s;
    throw InitialStateError("supplied initial attack does not trigger any emergency response");
  }

  bool any_authority = false;
  for (const auto& bus : net.buses) any_authority |= net.vulnerability * bus.load > 0.0;
  if (!any_authority) {
    if (auto s = try_attack(simulator, median_attack(density), "no-authority")) return *s;
    throw InitialStateError(
        "the attacker controls no load, so no attack can trigger an emergency response; "
        "increase the vulnerability fraction");
  }

  auto saturated = median_attack(density);
  for (std::size_t i = 0; i < n; ++i)
    if (net.buses[i].load > 0.0) saturated[i] = net.vulnerability * net.buses[i].load;
  if (auto s = try_attack(simulator, saturated, "saturated-increase")) return *s;

  // Areas with surplus generation export power; attack them downwards.
  std::map<int, double> surplus;
  for (std::size_t i = 0; i < n; ++i) {
    surplus[net.buses[i].area] -= net.buses[i].load;
    if (net.is_generator(i)) surplus[net.buses[i].area] += net.generators[i].p_eq;
  }
  auto exploit = saturated;
  for (std::size_t i = 0; i < n; ++i)
    if (net.buses[i].load > 0.0 && surplus[net.buses[i].area] > 0.0) exploit[i] = -exploit[i];
  if (auto s = try_attack(simulator, exploit, "area-imbalance")) return *s;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  constexpr std::size_t batch = 64;
  for (std::size_t used = 0; used < budget;) {
    const std::size_t count = std::min(batch, budget - used);
    std::vector<std::vector<double>> draws(count);
    for (auto& u : draws) {
      std::vector<double> y(n);
      for (double& v : y) v = normal(rng);
      u = attack_from_standard(y, density);
    }
    const auto flags = indicator_batch(simulator, draws);
    for (std::size_t k = 0; k < count; ++k)
      if (flags[k]) {
        if (auto s = try_attack(simulator, draws[k], "random-search")) return *s;
      }
    used += count;
  }
  throw InitialStateError(
      "no attack triggering an emergency response found within the search budget; "
      "increase the vulnerability fraction or sigma");
}

ProposalConfig make_proposal_config(const SamplerSettings& settings, std::size_t dimension) {
  ProposalConfig p;
  p.step_scale.assign(dimension, settings.step_scale);
  p.halting_max = settings.halting_max;
  p.halting_law = settings.halting_law;
  p.halting_probability = settings.halting_probability;
  p.proposal_count = settings.proposals;
  p.seed = derive_seed(settings.seed, 1);
  p.burn_in = settings.burn_in;
  p.thin = settings.thin;
  return p;
}

CampaignResult run_campaign(const CampaignConfig& config, const Simulator& simulator) {
  const auto& net = simulator.network();
  CampaignResult result;
  result.initial = initial_state(simulator, config.density, config.initial_attack,
                                 config.sampler.init_budget, derive_seed(config.sampler.seed, 0));

  const auto at = make_attack_target(simulator, config.density, config.sampler.space);
  OracleResult first{true, result.initial.outcome};
  auto start = at.from_attack(result.initial.attack);
  result.chain = run_chain(at.target, std::move(start), std::move(first),
                           make_proposal_config(config.sampler, net.bus_count()));
  attach_attacks(result, at, net);
  return result;
}

void attach_attacks(CampaignResult& result, const AttackTarget& target,
                    const NetworkModel& network) {
  result.attacks.clear();
  result.realized.clear();
  for (const auto& rec : result.chain.records) {
    auto u = target.to_attack(rec.state);
    result.realized.push_back(realized_attack(u, network));
    result.attacks.push_back(std::move(u));
  }
}

CampaignResult resume_campaign(const CampaignConfig& config, const Simulator& simulator,
                               const ChainCheckpoint& checkpoint) {
  const auto at = make_attack_target(simulator, config.density, config.sampler.space);
  CampaignResult result;
  result.chain = resume_chain(at.target, checkpoint,
                              make_proposal_config(config.sampler, simulator.network().bus_count()));
  attach_attacks(result, at, simulator.network());
  return result;
}

CampaignResult run_campaign(const CampaignConfig& config) {
  const Simulator simulator(config.preset.network, config.thresholds(), config.simulation);
  return run_campaign(config, simulator);
}

}  // namespace laa
