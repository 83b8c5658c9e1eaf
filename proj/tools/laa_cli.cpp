#include "laa/analysis.hpp"
#include "laa/attack_model.hpp"
#include "laa/campaign.hpp"
#include "laa/config.hpp"
#include "laa/csv_io.hpp"
#include "laa/simulator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> nu;
  std::optional<std::string> out;
  std::size_t chains = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config, "campaign or network YAML file")->envname("LAA_CONFIG");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "sampler seed override")->envname("LAA_SEED");
  cmd->add_option("--nu", o.nu, "vulnerability fraction override")->envname("LAA_NU");
  cmd->add_option("--out", o.out, "output directory override")->envname("LAA_OUT");
  cmd->add_option("--chains", o.chains, "number of independent chains")
      ->envname("LAA_CHAINS")
      ->check(CLI::PositiveNumber);
}

laa::CampaignConfig resolve(const CommonOptions& o) {
  auto cfg = laa::load_campaign(o.config);
  if (o.seed) cfg.sampler.seed = *o.seed;
  if (o.nu) cfg.set_vulnerability(*o.nu);
  if (o.out) cfg.output_dir = *o.out;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename F>
void write_with(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
}

int cmd_equilibrium(const CommonOptions& o) {
  const auto cfg = resolve(o);
  const auto& net = cfg.preset.network;
  laa::DynamicState eq;
  try {
    eq = laa::solve_equilibrium(net, cfg.simulation.equilibrium);
  } catch (const laa::EquilibriumError& e) {
    std::cerr << "error: " << e.what() << "\nresidual " << e.residual() << "\n";
    return 2;
  }
  const double residual = laa::equilibrium_residual(net, eq);
  std::cout << std::setprecision(10);
  std::cout << "bus,name,area,angle_rad,voltage\n";
  for (std::size_t i = 0; i < net.bus_count(); ++i)
    std::cout << i + 1 << ',' << net.buses[i].name << ',' << net.buses[i].area << ','
              << eq.angle[i] << ',' << eq.voltage[i] << '\n';
  std::cout << "\nline,from,to,flow\n";
  for (std::size_t l = 0; l < net.lines.size(); ++l)
    std::cout << l + 1 << ',' << net.lines[l].from + 1 << ',' << net.lines[l].to + 1 << ','
              << laa::line_flow(net, eq, l) << '\n';
  std::cout << "\nresidual " << std::scientific << residual << '\n';
  return residual < 1e-8 ? 0 : 1;
}

int cmd_simulate_one(const CommonOptions& o, const std::string& attack_path, std::size_t row,
                     const std::vector<std::size_t>& trips, std::size_t stride) {
  auto cfg = resolve(o);
  const auto& net = cfg.preset.network;
  std::vector<double> u(net.bus_count(), 0.0);
  if (!attack_path.empty()) {
    std::ifstream in(attack_path);
    if (!in) throw std::runtime_error("cannot open attack file " + attack_path);
    const auto attacks = laa::read_attack_csv(in, net.bus_count());
    if (row >= attacks.size())
      throw laa::CsvError("attack file has " + std::to_string(attacks.size()) + " rows, row " +
                          std::to_string(row + 1) + " requested");
    u = attacks[row];
  }
  std::vector<std::size_t> forced;
  for (auto g : trips) {
    if (g == 0 || g > net.generator_count)
      throw laa::ConfigError("--trip-generator must name a generator 1.." +
                             std::to_string(net.generator_count));
    forced.push_back(g - 1);
  }
  const laa::Simulator sim(net, cfg.thresholds(), cfg.simulation);
  const auto outcome =
      sim.run(laa::effective_attack(u, net), forced, stride == 0 ? 1 : stride, false);

  fs::create_directories(cfg.output_dir);
  write_file(cfg.output_dir / "config.yaml", laa::dump_resolved(cfg));
  write_with(cfg.output_dir / "events.csv",
             [&](std::ostream& out) { laa::write_events_csv(out, outcome.events, net); });
  write_with(cfg.output_dir / "trajectory.csv",
             [&](std::ostream& out) { laa::write_trajectory_csv(out, outcome.trajectory); });
  write_with(cfg.output_dir / "line_flows.csv", [&](std::ostream& out) {
    laa::write_line_flow_csv(out, outcome.trajectory, net);
  });
  write_with(cfg.output_dir / "outcome.csv", [&](std::ostream& out) {
    out << "failure,status,events,final_time\n"
        << (outcome.failure ? 1 : 0) << ',' << laa::to_string(outcome.status) << ','
        << outcome.events.size() << ',' << laa::format_double(outcome.final_time) << '\n';
  });
  std::cout << "failure " << (outcome.failure ? "yes" : "no") << ", " << outcome.events.size()
            << " events, status " << laa::to_string(outcome.status) << '\n';
  for (const auto& e : outcome.events)
    std::cout << "  t=" << e.time << ' ' << laa::to_string(e.kind) << " at " << e.location + 1
              << (e.kind == laa::ErKind::ufls ? " stage " + std::to_string(e.stage) : "") << '\n';
  return outcome.status == laa::SimStatus::numerical_fault ? 3 : 0;
}

void write_chain_outputs(const fs::path& dir, const laa::CampaignResult& result,
                         const laa::CampaignConfig& cfg) {
  write_with(dir / "chain.csv",
             [&](std::ostream& out) { laa::write_chain_csv(out, result, cfg.preset.network); });
  write_file(dir / "diagnostics.json",
             laa::diagnostics_json(result, cfg.vulnerability(), cfg.sampler.seed));
}

int run_one_chain(laa::CampaignConfig cfg, const fs::path& dir, bool resume) {
  fs::create_directories(dir);
  write_file(dir / "config.yaml", laa::dump_resolved(cfg));
  const auto& net = cfg.preset.network;
  const laa::Simulator sim(net, cfg.thresholds(), cfg.simulation);
  const auto checkpoint_path = dir / "checkpoint.json";
  try {
    if (resume) {
      std::ifstream in(checkpoint_path);
      if (!in) throw std::runtime_error("no checkpoint at " + checkpoint_path.string());
      std::stringstream text;
      text << in.rdbuf();
      const auto checkpoint = laa::parse_checkpoint_json(text.str());
      auto result = laa::resume_campaign(cfg, sim, checkpoint);
      std::stringstream rows;
      laa::write_chain_csv(rows, result, net);
      std::string header;
      std::getline(rows, header);
      std::ofstream out(dir / "chain.csv", std::ios::binary | std::ios::app);
      out << rows.rdbuf();
      write_file(dir / "diagnostics.json",
                 laa::diagnostics_json(result, cfg.vulnerability(), cfg.sampler.seed));
      fs::remove(checkpoint_path);
      return 0;
    }
    const auto result = laa::run_campaign(cfg, sim);
    write_chain_outputs(dir, result, cfg);
    fs::remove(checkpoint_path);
    std::cout << dir.string() << ": acceptance rate "
              << result.chain.diagnostics.acceptance_rate << ", "
              << result.chain.diagnostics.total_oracle_calls << " simulations, "
              << result.chain.diagnostics.wall_seconds << " s\n";
    return 0;
  } catch (const laa::ChainAborted& e) {
    laa::CampaignResult partial;
    partial.chain = e.partial();
    laa::attach_attacks(partial, laa::make_attack_target(sim, cfg.density, cfg.sampler.space),
                        net);
    write_chain_outputs(dir, partial, cfg);
    write_file(checkpoint_path, laa::checkpoint_json(e.checkpoint()));
    std::cerr << "error: " << e.what() << "\ncheckpoint written to " << checkpoint_path.string()
              << "; rerun with --resume to continue\n";
    return 4;
  }
}

int cmd_sample(const CommonOptions& o, bool resume) {
  const auto base = resolve(o);
  if (o.chains == 1) return run_one_chain(base, base.output_dir, resume);

  std::vector<int> codes(o.chains, 0);
  std::vector<std::string> errors(o.chains);
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < static_cast<long>(o.chains); ++k) {
    auto cfg = base;
    cfg.sampler.seed = k == 0 ? base.sampler.seed : laa::derive_seed(base.sampler.seed, 1000 + k);
    try {
      codes[k] = run_one_chain(cfg, base.output_dir / ("chain_" + std::to_string(k + 1)), resume);
    } catch (const std::exception& e) {
      errors[k] = e.what();
      codes[k] = 1;
    }
  }
  int code = 0;
  for (std::size_t k = 0; k < o.chains; ++k) {
    if (!errors[k].empty()) std::cerr << "chain " << k + 1 << ": " << errors[k] << '\n';
    code = std::max(code, codes[k]);
  }
  return code;
}

int cmd_analyze(const CommonOptions& o, const std::vector<std::string>& chains,
                const laa::HistogramGrid& grid) {
  const auto cfg = resolve(o);
  std::vector<laa::LabelledSummary> summaries;
  for (const auto& path : chains) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chain file " + path);
    laa::ChainTable table;
    try {
      table = laa::read_chain_csv(in);
    } catch (const laa::CsvError& e) {
      throw laa::CsvError(path + ": " + e.what());
    }
    if (table.buses != cfg.preset.network.bus_count() ||
        table.lines != cfg.preset.network.lines.size())
      throw laa::CsvError(path + ": chain columns do not match the configured network");
    if (table.records.empty()) throw laa::AnalysisError(path + ": empty chain");
    auto label = fs::path(path).parent_path().filename().string();
    if (label.empty()) label = fs::path(path).stem().string();
    summaries.push_back({label, laa::summarize(table.records, cfg.preset.network, cfg.density,
                                               table.nu, grid)});
  }
  fs::create_directories(cfg.output_dir);
  write_with(cfg.output_dir / "histograms.csv",
             [&](std::ostream& out) { laa::write_histograms_csv(out, summaries); });
  write_with(cfg.output_dir / "er_rates.csv",
             [&](std::ostream& out) { laa::write_er_rates_csv(out, summaries); });
  write_with(cfg.output_dir / "area_table.csv",
             [&](std::ostream& out) { laa::write_area_table_csv(out, summaries); });
  for (const auto& [label, s] : summaries)
    std::cout << label << ": nu " << s.nu << " (" << laa::to_string(s.regime) << "), "
              << s.rates.sample_size << " samples, acceptance " << s.acceptance_rate
              << ", eps = [" << s.rates.aggregate[0] << ", " << s.rates.aggregate[1] << ", "
              << s.rates.aggregate[2] << ", " << s.rates.aggregate[3] << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Load-altering attack campaigns on a power grid model"};
  app.require_subcommand(1);

  CommonOptions eq_opts, sim_opts, sample_opts, analyze_opts;

  auto* eq = app.add_subcommand("equilibrium", "solve and print the operating point");
  add_common(eq, eq_opts);

  auto* sim = app.add_subcommand("simulate-one", "simulate one attack and write its trajectory");
  add_common(sim, sim_opts);
  std::string attack_path;
  std::size_t row = 1;
  std::vector<std::size_t> trips;
  std::size_t stride = 1;
  sim->add_option("--attack", attack_path, "attack CSV (default: zero attack)")
      ->check(CLI::ExistingFile);
  sim->add_option("--row", row, "1-based data row of the attack file")->check(CLI::PositiveNumber);
  sim->add_option("--trip-generator", trips, "disconnect generator G at t = 0 (repeatable)");
  sim->add_option("--stride", stride, "store every k-th integrator step");

  auto* sample = app.add_subcommand("sample", "run the sampler and write chain records");
  add_common(sample, sample_opts);
  bool resume = false;
  sample->add_flag("--resume", resume, "continue from checkpoint.json in the output directory");

  auto* analyze = app.add_subcommand("analyze", "summarize one or more chain files");
  add_common(analyze, analyze_opts);
  std::vector<std::string> chains;
  laa::HistogramGrid grid;
  analyze->add_option("files", chains, "chain CSV files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--bins", grid.bins, "histogram bins");
  analyze->add_option("--lower", grid.lower, "lowest histogram edge of |u|");
  analyze->add_option("--upper", grid.upper, "highest histogram edge of |u|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*eq) return cmd_equilibrium(eq_opts);
    if (*sim) return cmd_simulate_one(sim_opts, attack_path, row - 1, trips, stride);
    if (*sample) return cmd_sample(sample_opts, resume);
    if (*analyze) return cmd_analyze(analyze_opts, chains, grid);
  } catch (const laa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const laa::CsvError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
