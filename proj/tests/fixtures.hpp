#pragma once

#include "laa/config.hpp"
#include "laa/grid_model.hpp"

#include <string>

namespace fixtures {

inline std::string preset_path(const std::string& name) {
  return std::string(LAA_PRESET_DIR) + "/" + name;
}

inline laa::CampaignConfig ktas() { return laa::load_campaign(preset_path("campaign_ktas.yaml")); }

// One generator feeding one load over a single line; X = 0 pins both
// voltages to their field voltages.
inline laa::NetworkModel two_bus(double load = 1.0, double b = 10.0) {
  laa::NetworkModel net;
  net.generator_count = 1;
  net.buses = {{"G", 1, 1.0, 0.0, 1.0, 0.0}, {"L", 2, 1.0, 0.0, 1.0, load}};
  net.generators = {{1.0, 0.5, load + 1.0, load, 0.0, 1.0}};
  net.lines = {{0, 1, b, false, std::nullopt}};
  net.damping = 0.5;
  net.deadband = 0.0;
  net.vulnerability = 0.5;
  return net;
}

// Two generators and two loads in two areas joined by a monitored tie.
inline laa::NetworkModel four_bus() {
  laa::NetworkModel net;
  net.generator_count = 2;
  net.buses = {{"G1", 1, 1.0, 0.02, 1.05, 0.0},
               {"G2", 2, 1.0, 0.02, 1.05, 0.0},
               {"L3", 1, 1.0, 0.02, 1.0, 1.0},
               {"L4", 2, 1.0, 0.02, 1.0, 2.0}};
  net.generators = {{0.5, 0.01, 3.0, 2.0, 0.0, 1.0}, {0.5, 0.01, 3.0, 1.0, 0.0, 1.0}};
  net.lines = {{0, 2, 10.0, false, std::nullopt},
               {1, 3, 10.0, false, std::nullopt},
               {2, 3, 8.0, true, 2.0}};
  net.damping = 1.0;
  net.deadband = 0.0;
  net.vulnerability = 0.5;
  return net;
}

}  // namespace fixtures
