#include "laa/csv_io.hpp"

#include <json.hpp>

#include <charconv>
#include <istream>
#include <map>
#include <ostream>

namespace laa {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  for (auto& s : cells) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }
  return cells;
}

namespace {

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != last)
    throw CsvError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                   ": not a number: '" + cell + "'");
  return v;
}

long parse_integer(const std::string& cell, std::size_t row, std::size_t col) {
  long v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw CsvError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                   ": not an integer: '" + cell + "'");
  return v;
}

template <typename T>
void write_row(std::ostream& out, const std::vector<T>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::vector<std::vector<double>> read_attack_csv(std::istream& in, std::size_t buses) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("attack file is empty");
  const auto header = split_csv_line(line);
  if (header.size() != buses)
    throw CsvError("row 1: expected " + std::to_string(buses) + " columns, found " +
                   std::to_string(header.size()));
  std::vector<std::vector<double>> out;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != buses)
      throw CsvError("row " + std::to_string(row) + ": expected " + std::to_string(buses) +
                     " columns, found " + std::to_string(cells.size()));
    std::vector<double> u(buses);
    for (std::size_t c = 0; c < buses; ++c) u[c] = parse_number(cells[c], row, c + 1);
    out.push_back(std::move(u));
  }
  if (out.empty()) throw CsvError("attack file has no data rows");
  return out;
}

void write_attack_csv(std::ostream& out, const std::vector<std::vector<double>>& attacks) {
  if (attacks.empty()) return;
  std::vector<std::string> head;
  for (std::size_t i = 0; i < attacks.front().size(); ++i) head.push_back("u_" + std::to_string(i + 1));
  write_row(out, head);
  for (const auto& u : attacks) {
    std::vector<std::string> cells;
    for (double v : u) cells.push_back(format_double(v));
    write_row(out, cells);
  }
}

void write_events_csv(std::ostream& out, const std::vector<ErEvent>& events,
                      const NetworkModel& /*network*/) {
  out << "time,kind,location,stage\n";
  for (const auto& e : events)
    out << format_double(e.time) << ',' << to_string(e.kind) << ',' << e.location + 1 << ','
        << e.stage << '\n';
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory) {
  out << "t,bus,speed,voltage,injection\n";
  for (const auto& s : trajectory)
    for (std::size_t i = 0; i < s.speed.size(); ++i)
      out << format_double(s.time) << ',' << i + 1 << ',' << format_double(s.speed[i]) << ','
          << format_double(s.voltage[i]) << ',' << format_double(s.injection[i]) << '\n';
}

void write_line_flow_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory,
                         const NetworkModel& network) {
  out << "t,line,from,to,flow\n";
  for (const auto& s : trajectory)
    for (std::size_t l = 0; l < s.line_flow.size(); ++l)
      out << format_double(s.time) << ',' << l + 1 << ',' << network.lines[l].from + 1 << ','
          << network.lines[l].to + 1 << ',' << format_double(s.line_flow[l]) << '\n';
}

void write_chain_csv(std::ostream& out, const CampaignResult& result, const NetworkModel& network) {
  const std::size_t n = network.bus_count(), m = network.lines.size();
  std::vector<std::string> head{"round", "accepted", "nu"};
  for (const char* prefix : {"u_", "ueff_", "rigs_", "ofgs_", "ufls_"})
    for (std::size_t i = 0; i < n; ++i) head.push_back(prefix + std::to_string(i + 1));
  for (std::size_t l = 0; l < m; ++l) head.push_back("trip_" + std::to_string(l + 1));
  head.push_back("skips");
  head.push_back("oracle_calls");
  write_row(out, head);

  const auto nu = format_double(network.vulnerability);
  for (std::size_t k = 0; k < result.chain.records.size(); ++k) {
    const auto& rec = result.chain.records[k];
    const auto counts = rec.outcome ? rec.outcome->counts : ActivationCounts::zeros(n, m);
    out << rec.round << ',' << (rec.accepted ? 1 : 0) << ',' << nu;
    for (double v : result.attacks[k]) out << ',' << format_double(v);
    for (double v : result.realized[k]) out << ',' << format_double(v);
    for (const auto* v : {&counts.rigs, &counts.ofgs, &counts.ufls, &counts.line_trip})
      for (int c : *v) out << ',' << c;
    out << ',' << rec.skips << ',' << rec.oracle_calls << '\n';
  }
}

ChainTable read_chain_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("chain file is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < header.size(); ++c) col[header[c]] = c;

  auto need = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) throw CsvError("chain file: missing column '" + name + "'");
    return it->second;
  };
  ChainTable table;
  while (col.count("u_" + std::to_string(table.buses + 1))) ++table.buses;
  while (col.count("trip_" + std::to_string(table.lines + 1))) ++table.lines;
  if (table.buses == 0) throw CsvError("chain file: no u_ columns");

  const auto c_accepted = need("accepted"), c_nu = need("nu");
  need("round");
  std::vector<std::size_t> cu, ce, cr, co, cf, ct;
  for (std::size_t i = 1; i <= table.buses; ++i) {
    const auto s = std::to_string(i);
    cu.push_back(need("u_" + s));
    ce.push_back(need("ueff_" + s));
    cr.push_back(need("rigs_" + s));
    co.push_back(need("ofgs_" + s));
    cf.push_back(need("ufls_" + s));
  }
  for (std::size_t l = 1; l <= table.lines; ++l) ct.push_back(need("trip_" + std::to_string(l)));

  bool first = true;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw CsvError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                     " columns, found " + std::to_string(cells.size()));
    const double nu = parse_number(cells[c_nu], row, c_nu + 1);
    if (first) table.nu = nu;
    else if (nu != table.nu)
      throw CsvError("row " + std::to_string(row) + ": vulnerability differs within one chain");
    first = false;

    SampleRecord r;
    r.accepted = parse_integer(cells[c_accepted], row, c_accepted + 1) != 0;
    auto nums = [&](const std::vector<std::size_t>& cols, std::vector<double>& dst) {
      for (auto c : cols) dst.push_back(parse_number(cells[c], row, c + 1));
    };
    auto ints = [&](const std::vector<std::size_t>& cols, std::vector<int>& dst) {
      for (auto c : cols) dst.push_back(static_cast<int>(parse_integer(cells[c], row, c + 1)));
    };
    nums(cu, r.attack);
    nums(ce, r.effective);
    ints(cr, r.rigs);
    ints(co, r.ofgs);
    ints(cf, r.ufls);
    ints(ct, r.line_trip);
    table.records.push_back(std::move(r));
  }
  return table;
}

std::vector<SampleRecord> to_sample_records(const CampaignResult& result) {
  std::vector<SampleRecord> out;
  out.reserve(result.chain.records.size());
  for (std::size_t k = 0; k < result.chain.records.size(); ++k) {
    const auto& rec = result.chain.records[k];
    SampleRecord r;
    r.attack = result.attacks[k];
    r.effective = result.realized[k];
    r.accepted = rec.accepted;
    if (rec.outcome) {
      r.rigs = rec.outcome->counts.rigs;
      r.ofgs = rec.outcome->counts.ofgs;
      r.ufls = rec.outcome->counts.ufls;
      r.line_trip = rec.outcome->counts.line_trip;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string checkpoint_json(const ChainCheckpoint& checkpoint) {
  nlohmann::ordered_json j;
  j["next_round"] = checkpoint.next_round;
  j["state"] = checkpoint.state;
  j["rng_state"] = checkpoint.rng_state;
  const auto& d = checkpoint.diagnostics;
  j["proposals"] = d.proposals;
  j["accepted"] = d.accepted;
  j["total_oracle_calls"] = d.total_oracle_calls;
  j["oracle_calls_per_round"] = d.oracle_calls_per_round;
  j["wall_seconds"] = d.wall_seconds;
  return j.dump(2) + "\n";
}

ChainCheckpoint parse_checkpoint_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ChainCheckpoint c;
    c.next_round = j.at("next_round").get<std::size_t>();
    c.state = j.at("state").get<std::vector<double>>();
    c.rng_state = j.at("rng_state").get<std::string>();
    c.diagnostics.proposals = j.at("proposals").get<std::size_t>();
    c.diagnostics.accepted = j.at("accepted").get<std::size_t>();
    c.diagnostics.total_oracle_calls = j.at("total_oracle_calls").get<std::size_t>();
    c.diagnostics.oracle_calls_per_round =
        j.at("oracle_calls_per_round").get<std::vector<std::size_t>>();
    c.diagnostics.wall_seconds = j.at("wall_seconds").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CsvError(std::string("checkpoint: ") + e.what());
  }
}

std::string diagnostics_json(const CampaignResult& result, double nu, std::uint64_t seed) {
  const auto& d = result.chain.diagnostics;
  nlohmann::ordered_json j;
  j["vulnerability"] = nu;
  j["seed"] = seed;
  j["initial_strategy"] = result.initial.strategy;
  j["proposals"] = d.proposals;
  j["accepted"] = d.accepted;
  j["acceptance_rate"] = d.acceptance_rate;
  j["total_oracle_calls"] = d.total_oracle_calls;
  j["records"] = result.chain.records.size();
  j["runtime_seconds"] = d.wall_seconds;
  return j.dump(2) + "\n";
}

void write_histograms_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries) {
  out << "chain,nu,node,bin,lower,upper,count,conditional_mass,reference_mass\n";
  for (const auto& [label, s] : summaries)
    for (const auto& h : s.histograms) {
      const double total = static_cast<double>(h.total());
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << label << ',' << format_double(s.nu) << ',' << h.node + 1 << ',' << b + 1 << ','
            << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
            << h.counts[b] << ',' << format_double(h.counts[b] / total) << ','
            << format_double(h.reference_mass[b]) << '\n';
    }
}

void write_er_rates_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries) {
  out << "chain,nu,regime,kind,f,scope,location,rate\n";
  for (const auto& [label, s] : summaries) {
    const std::string prefix = label + ',' + format_double(s.nu) + ',' + std::string(to_string(s.regime)) + ',';
    for (const auto& e : s.rates.per_location)
      out << prefix << to_string(e.kind) << ',' << static_cast<int>(e.kind) << ','
          << (e.kind == ErKind::line_trip ? "line" : "bus") << ',' << e.location + 1 << ','
          << format_double(e.rate) << '\n';
    for (int f = 1; f <= 4; ++f)
      out << prefix << to_string(static_cast<ErKind>(f)) << ',' << f << ",all,0,"
          << format_double(s.rates.aggregate[f - 1]) << '\n';
  }
}

void write_area_table_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries) {
  out << "chain,nu,regime,acceptance_rate,samples,area_a,area_b,change_a,change_b,count,probability\n";
  for (const auto& [label, s] : summaries)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        out << label << ',' << format_double(s.nu) << ',' << to_string(s.regime) << ','
            << format_double(s.acceptance_rate) << ',' << s.areas.total << ',' << s.areas.area_a
            << ',' << s.areas.area_b << ',' << (a ? "decrease" : "increase") << ','
            << (b ? "decrease" : "increase") << ',' << s.areas.counts[a][b] << ','
            << format_double(s.areas.probability(a == 0, b == 0)) << '\n';
}

}  // namespace laa
