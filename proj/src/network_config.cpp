#include "laa/config.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace laa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const YAML::Node& node, const char* key, const std::string& where) {
  if (!node[key]) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback, const std::string& where) {
  if (!node[key]) return fallback;
  return get<T>(node, key, where);
}

void parse_protection(const YAML::Node& node, ProtectionSettings& p) {
  const std::string where = "protection";
  check_keys(node, where,
             {"rocof_limit_hz_per_s", "over_frequency_hz", "ufls_stages_hz", "inspection_interval"});
  p.rocof_hz_per_s = get_or(node, "rocof_limit_hz_per_s", p.rocof_hz_per_s, where);
  if (node["over_frequency_hz"]) p.over_frequency_hz = get<double>(node, "over_frequency_hz", where);
  if (node["ufls_stages_hz"]) {
    const auto v = get<std::vector<double>>(node, "ufls_stages_hz", where);
    if (v.size() != 4) throw ConfigError("protection: exactly four UFLS stages are required");
    p.ufls_hz = std::array<double, 4>{v[0], v[1], v[2], v[3]};
  }
  p.inspection_interval = get_or(node, "inspection_interval", p.inspection_interval, where);
}

BusParams parse_bus_common(const YAML::Node& node, const std::string& where) {
  BusParams bus;
  bus.name = get_or<std::string>(node, "name", "", where);
  bus.area = get_or(node, "area", 1, where);
  bus.time_constant = get<double>(node, "time_constant", where);
  bus.reactance = get<double>(node, "reactance", where);
  bus.field_voltage = get<double>(node, "field_voltage", where);
  bus.load = get_or(node, "load", 0.0, where);
  return bus;
}

YAML::Node emit_network(const NetworkPreset& preset) {
  const auto& net = preset.network;
  YAML::Node root;
  root["system"]["nominal_frequency_hz"] = net.nominal_frequency_hz;
  root["system"]["damping"] = net.damping;
  root["system"]["deadband_hz"] = net.deadband / kTwoPi;
  root["system"]["vulnerability"] = net.vulnerability;
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const auto& bus = net.buses[i];
    YAML::Node b;
    b["name"] = bus.name;
    b["area"] = bus.area;
    b["time_constant"] = bus.time_constant;
    b["reactance"] = bus.reactance;
    b["field_voltage"] = bus.field_voltage;
    b["load"] = bus.load;
    if (net.is_generator(i)) {
      const auto& g = net.generators[i];
      b["inertia"] = g.inertia;
      b["droop"] = g.droop;
      b["p_max"] = g.p_max;
      b["p_eq"] = g.p_eq;
      b["avr_gain"] = g.avr_gain;
      b["avr_setpoint"] = g.avr_setpoint;
      root["generators"].push_back(b);
    } else {
      root["loads"].push_back(b);
    }
  }
  for (const auto& line : net.lines) {
    YAML::Node l;
    l["from"] = line.from + 1;
    l["to"] = line.to + 1;
    l["susceptance"] = line.susceptance;
    l["monitored"] = line.monitored;
    if (line.flow_limit) l["flow_limit"] = *line.flow_limit;
    root["lines"].push_back(l);
  }
  const auto t = preset.protection;
  const double f0 = net.nominal_frequency_hz;
  root["protection"]["rocof_limit_hz_per_s"] = t.rocof_hz_per_s;
  root["protection"]["over_frequency_hz"] = t.over_frequency_hz.value_or(f0 + 1.5);
  const auto stages = t.ufls_hz.value_or(std::array<double, 4>{f0 - 0.5, f0 - 1.0, f0 - 1.5, f0 - 2.0});
  for (double s : stages) root["protection"]["ufls_stages_hz"].push_back(s);
  root["protection"]["inspection_interval"] = t.inspection_interval;
  return root;
}

}  // namespace

ErThresholds ProtectionSettings::to_thresholds(double nominal_hz) const {
  const double over = over_frequency_hz.value_or(nominal_hz + 1.5);
  const auto stages = ufls_hz.value_or(
      std::array<double, 4>{nominal_hz - 0.5, nominal_hz - 1.0, nominal_hz - 1.5, nominal_hz - 2.0});
  return ErThresholds::from_hz(nominal_hz, rocof_hz_per_s, over, stages, inspection_interval);
}

NetworkPreset parse_network(const YAML::Node& root) {
  NetworkPreset preset;
  auto& net = preset.network;

  const auto system = root["system"];
  if (!system) throw ConfigError("network: missing 'system' block");
  check_keys(system, "system", {"nominal_frequency_hz", "damping", "deadband_hz", "vulnerability"});
  net.nominal_frequency_hz = get_or(system, "nominal_frequency_hz", 50.0, "system");
  net.damping = get<double>(system, "damping", "system");
  net.deadband = kTwoPi * get_or(system, "deadband_hz", 0.05, "system");
  net.vulnerability = get_or(system, "vulnerability", 0.0, "system");

  const auto gens = root["generators"];
  if (!gens || !gens.IsSequence() || gens.size() == 0)
    throw ConfigError("network: 'generators' must be a nonempty list");
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const std::string where = "generators[" + std::to_string(g) + "]";
    check_keys(gens[g], where,
               {"name", "area", "inertia", "droop", "p_max", "p_eq", "time_constant", "reactance",
                "field_voltage", "avr_gain", "avr_setpoint", "load"});
    net.buses.push_back(parse_bus_common(gens[g], where));
    GeneratorParams p;
    p.inertia = get<double>(gens[g], "inertia", where);
    p.droop = get<double>(gens[g], "droop", where);
    p.p_max = get<double>(gens[g], "p_max", where);
    p.p_eq = get<double>(gens[g], "p_eq", where);
    p.avr_gain = get_or(gens[g], "avr_gain", 0.0, where);
    p.avr_setpoint = get_or(gens[g], "avr_setpoint", 1.0, where);
    net.generators.push_back(p);
  }
  net.generator_count = net.generators.size();

  if (const auto loads = root["loads"]) {
    if (!loads.IsSequence()) throw ConfigError("network: 'loads' must be a list");
    for (std::size_t l = 0; l < loads.size(); ++l) {
      const std::string where = "loads[" + std::to_string(l) + "]";
      check_keys(loads[l], where,
                 {"name", "area", "load", "time_constant", "reactance", "field_voltage"});
      net.buses.push_back(parse_bus_common(loads[l], where));
    }
  }

  const auto lines = root["lines"];
  if (!lines || !lines.IsSequence()) throw ConfigError("network: 'lines' must be a list");
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string where = "lines[" + std::to_string(k) + "]";
    check_keys(lines[k], where, {"from", "to", "susceptance", "monitored", "flow_limit"});
    Line line;
    const int from = get<int>(lines[k], "from", where);
    const int to = get<int>(lines[k], "to", where);
    if (from < 1 || to < 1 || static_cast<std::size_t>(from) > net.bus_count() ||
        static_cast<std::size_t>(to) > net.bus_count())
      throw ConfigError(where + ": bus index out of range");
    line.from = static_cast<std::size_t>(from - 1);
    line.to = static_cast<std::size_t>(to - 1);
    line.susceptance = get<double>(lines[k], "susceptance", where);
    line.monitored = get_or(lines[k], "monitored", false, where);
    if (lines[k]["flow_limit"]) line.flow_limit = get<double>(lines[k], "flow_limit", where);
    net.lines.push_back(line);
  }

  if (const auto prot = root["protection"]) parse_protection(prot, preset.protection);
  net.validate();
  preset.protection.to_thresholds(net.nominal_frequency_hz);
  return preset;
}

NetworkPreset load_network(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("network file not found: " + path.string());
  try {
    return parse_network(YAML::LoadFile(path.string()));
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void CampaignConfig::set_vulnerability(double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("vulnerability must lie in [0, 1]");
  preset.network.vulnerability = nu;
}

ErThresholds CampaignConfig::thresholds() const {
  return preset.protection.to_thresholds(preset.network.nominal_frequency_hz);
}

void CampaignConfig::validate() const {
  preset.network.validate();
  thresholds();
  density.validate();
  if (density.dimension() != preset.network.bus_count())
    throw ConfigError("density dimension does not match the bus count");
  if (!(sampler.step_scale > 0.0)) throw ConfigError("sampler: step_scale must be positive");
  if (sampler.halting_max < 1) throw ConfigError("sampler: halting_max must be at least 1");
  if (sampler.thin < 1) throw ConfigError("sampler: thin must be at least 1");
  if (!(simulation.step > 0.0 && simulation.horizon > 0.0))
    throw ConfigError("simulation: step and horizon must be positive");
  if (initial_attack && initial_attack->size() != preset.network.bus_count())
    throw ConfigError("initial_attack: dimension does not match the bus count");
}

CampaignConfig parse_campaign(const YAML::Node& root, const std::filesystem::path& base_dir) {
  check_keys(root, "campaign",
             {"network", "vulnerability", "density", "sampler", "simulation", "protection",
              "output", "initial_attack", "system", "generators", "loads", "lines"});
  CampaignConfig cfg;
  if (root["network"]) {
    cfg.network_path = base_dir / get<std::string>(root, "network", "campaign");
    cfg.preset = load_network(cfg.network_path);
    if (root["generators"]) throw ConfigError("campaign: give either 'network' or inline blocks");
  } else {
    YAML::Node net;
    for (const char* key : {"system", "generators", "loads", "lines"})
      if (root[key]) net[key] = root[key];
    cfg.preset = parse_network(net);
  }
  if (root["protection"]) parse_protection(root["protection"], cfg.preset.protection);
  if (root["vulnerability"]) cfg.set_vulnerability(get<double>(root, "vulnerability", "campaign"));

  const std::size_t n = cfg.preset.network.bus_count();
  double mu = 0.0;
  double sigma = 4.0;
  if (const auto d = root["density"]) {
    check_keys(d, "density", {"mu", "sigma"});
    mu = get_or(d, "mu", mu, "density");
    sigma = get_or(d, "sigma", sigma, "density");
  }
  cfg.density = DensityParams::uniform(n, mu, sigma);

  if (const auto s = root["sampler"]) {
    const std::string where = "sampler";
    check_keys(s, where,
               {"proposals", "halting_max", "halting_law", "halting_probability", "step_scale",
                "seed", "burn_in", "thin", "space", "init_budget"});
    auto& sp = cfg.sampler;
    sp.proposals = get_or(s, "proposals", sp.proposals, where);
    sp.halting_max = get_or(s, "halting_max", sp.halting_max, where);
    const auto law = get_or<std::string>(s, "halting_law", "constant", where);
    if (law == "constant") sp.halting_law = HaltingLaw::constant;
    else if (law == "geometric") sp.halting_law = HaltingLaw::geometric;
    else throw ConfigError("sampler: halting_law must be 'constant' or 'geometric'");
    sp.halting_probability = get_or(s, "halting_probability", sp.halting_probability, where);
    sp.step_scale = get_or(s, "step_scale", sp.step_scale, where);
    sp.seed = get_or(s, "seed", sp.seed, where);
    sp.burn_in = get_or(s, "burn_in", sp.burn_in, where);
    sp.thin = get_or(s, "thin", sp.thin, where);
    const auto space = get_or<std::string>(s, "space", "standardized", where);
    if (space == "standardized") sp.space = ProposalSpace::standardized;
    else if (space == "raw") sp.space = ProposalSpace::raw;
    else throw ConfigError("sampler: space must be 'standardized' or 'raw'");
    sp.init_budget = get_or(s, "init_budget", sp.init_budget, where);
  }

  if (const auto s = root["simulation"]) {
    check_keys(s, "simulation", {"step", "horizon", "trajectory_stride"});
    cfg.simulation.step = get_or(s, "step", cfg.simulation.step, "simulation");
    cfg.simulation.horizon = get_or(s, "horizon", cfg.simulation.horizon, "simulation");
    cfg.simulation.trajectory_stride =
        get_or(s, "trajectory_stride", cfg.simulation.trajectory_stride, "simulation");
  }
  if (root["output"]) cfg.output_dir = get<std::string>(root, "output", "campaign");
  if (root["initial_attack"])
    cfg.initial_attack = get<std::vector<double>>(root, "initial_attack", "campaign");
  cfg.validate();
  return cfg;
}

CampaignConfig load_campaign(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: " + path.string());
  try {
    auto cfg = parse_campaign(YAML::LoadFile(path.string()), path.parent_path());
    cfg.source = path;
    return cfg;
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_resolved(const CampaignConfig& config) {
  YAML::Node root = emit_network(config.preset);
  root["density"]["mu"] = config.density.mu.empty() ? 0.0 : config.density.mu.front();
  root["density"]["sigma"] = config.density.sigma.empty() ? 0.0 : config.density.sigma.front();
  const auto& s = config.sampler;
  root["sampler"]["proposals"] = s.proposals;
  root["sampler"]["halting_max"] = s.halting_max;
  root["sampler"]["halting_law"] = s.halting_law == HaltingLaw::constant ? "constant" : "geometric";
  root["sampler"]["halting_probability"] = s.halting_probability;
  root["sampler"]["step_scale"] = s.step_scale;
  root["sampler"]["seed"] = s.seed;
  root["sampler"]["burn_in"] = s.burn_in;
  root["sampler"]["thin"] = s.thin;
  root["sampler"]["space"] = s.space == ProposalSpace::standardized ? "standardized" : "raw";
  root["sampler"]["init_budget"] = s.init_budget;
  root["simulation"]["step"] = config.simulation.step;
  root["simulation"]["horizon"] = config.simulation.horizon;
  root["simulation"]["trajectory_stride"] = config.simulation.trajectory_stride;
  root["output"] = config.output_dir.string();
  if (config.initial_attack)
    for (double v : *config.initial_attack) root["initial_attack"].push_back(v);
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace laa
