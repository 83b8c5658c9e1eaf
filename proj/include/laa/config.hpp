#pragma once

#include "laa/attack_model.hpp"
#include "laa/grid_model.hpp"
#include "laa/protection.hpp"
#include "laa/sampler.hpp"
#include "laa/simulator.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <filesystem>
#include <optional>
#include <string>

namespace laa {

/// Protection settings as written in configuration files, in Hz.
struct ProtectionSettings {
  double rocof_hz_per_s = 1.0;
  std::optional<double> over_frequency_hz;  // default: nominal + 1.5
  std::optional<std::array<double, 4>> ufls_hz;  // default: nominal - {0.5, 1, 1.5, 2}
  double inspection_interval = 0.0;              // 0: every integrator step

  ErThresholds to_thresholds(double nominal_hz) const;
};

struct NetworkPreset {
  NetworkModel network;
  ProtectionSettings protection;
};

/// Parses a network document: `system`, `generators`, `loads`, `lines` and an
/// optional `protection` block. Generators are numbered first, from 1.
NetworkPreset parse_network(const YAML::Node& root);
NetworkPreset load_network(const std::filesystem::path& path);

enum class ProposalSpace { standardized, raw };

struct SamplerSettings {
  std::size_t proposals = 2000;
  std::size_t halting_max = 40;
  HaltingLaw halting_law = HaltingLaw::constant;
  double halting_probability = 0.1;
  double step_scale = 0.8;
  std::uint64_t seed = 1;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  ProposalSpace space = ProposalSpace::standardized;
  std::size_t init_budget = 2000;
};

struct CampaignConfig {
  std::filesystem::path source;        // the file this was read from
  std::filesystem::path network_path;  // empty when the network is inline
  NetworkPreset preset;
  DensityParams density;
  SamplerSettings sampler;
  SimConfig simulation;
  std::filesystem::path output_dir = "out";
  std::optional<std::vector<double>> initial_attack;

  double vulnerability() const { return preset.network.vulnerability; }
  void set_vulnerability(double nu);
  ErThresholds thresholds() const;
  void validate() const;
};

/// Reads a campaign file. The network is either inline or referenced by a
/// `network:` path relative to the campaign file.
CampaignConfig load_campaign(const std::filesystem::path& path);
CampaignConfig parse_campaign(const YAML::Node& root, const std::filesystem::path& base_dir);

/// Fully resolved configuration, network inlined, as YAML text.
std::string dump_resolved(const CampaignConfig& config);

}  // namespace laa
