#pragma once

#include "laa/analysis.hpp"
#include "laa/campaign.hpp"
#include "laa/grid_model.hpp"
#include "laa/simulator.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

/// Malformed or schema-incompatible CSV input. The message names the
/// offending row (1-based, header is row 1) and column where known.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation.
std::string format_double(double value);

std::vector<std::string> split_csv_line(const std::string& line);

// Attack files: header row u_1..u_n (any names), one attack per row.
std::vector<std::vector<double>> read_attack_csv(std::istream& in, std::size_t buses);
void write_attack_csv(std::ostream& out, const std::vector<std::vector<double>>& attacks);

void write_events_csv(std::ostream& out, const std::vector<ErEvent>& events,
                      const NetworkModel& network);
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory);
void write_line_flow_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory,
                         const NetworkModel& network);

// Chain files: round,accepted,nu,u_*,ueff_*,rigs_*,ofgs_*,ufls_*,trip_*,skips,oracle_calls
void write_chain_csv(std::ostream& out, const CampaignResult& result, const NetworkModel& network);

struct ChainTable {
  double nu = 0.0;
  std::size_t buses = 0;
  std::size_t lines = 0;
  std::vector<SampleRecord> records;
};

ChainTable read_chain_csv(std::istream& in);
std::vector<SampleRecord> to_sample_records(const CampaignResult& result);

std::string checkpoint_json(const ChainCheckpoint& checkpoint);
ChainCheckpoint parse_checkpoint_json(const std::string& text);

std::string diagnostics_json(const CampaignResult& result, double nu, std::uint64_t seed);

struct LabelledSummary {
  std::string label;
  CampaignSummary summary;
};

void write_histograms_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries);
void write_er_rates_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries);
void write_area_table_csv(std::ostream& out, const std::vector<LabelledSummary>& summaries);

}  // namespace laa
