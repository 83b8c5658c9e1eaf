#pragma once

#include "laa/attack_model.hpp"
#include "laa/grid_model.hpp"
#include "laa/protection.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace laa {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One retained chain state as seen by the analysis.
struct SampleRecord {
  std::vector<double> attack;     // u
  std::vector<double> effective;  // u clipped to the attacker's authority
  std::vector<int> rigs, ofgs, ufls;  // per bus
  std::vector<int> line_trip;         // per line
  bool accepted = false;
};

struct RateEntry {
  ErKind kind = ErKind::rigs;
  std::size_t location = 0;  // bus index, or line index for line trips
  double rate = 0.0;
};

struct ErRates {
  std::size_t sample_size = 0;
  std::vector<RateEntry> per_location;
  double aggregate[4] = {0, 0, 0, 0};  // indexed by kind - 1
  double of(ErKind kind) const { return aggregate[static_cast<int>(kind) - 1]; }
};

ErRates er_rates(std::span<const SampleRecord> records, std::size_t buses, std::size_t lines);

struct NodeHistogram {
  std::size_t node = 0;
  std::vector<double> edges;             // bins + 1 log-spaced edges
  std::vector<std::size_t> counts;       // conditional counts of |u_i|
  std::vector<double> reference_mass;    // rho marginal probability per bin
  std::size_t total() const;
};

struct HistogramGrid {
  std::size_t bins = 40;
  double lower = 1e-4;
  double upper = 1e4;
};

/// Values outside the grid fall into the first or last bin; so does the
/// reference tail mass.
std::vector<NodeHistogram> conditional_histograms(std::span<const SampleRecord> records,
                                                  const DensityParams& density,
                                                  const HistogramGrid& grid = {});

/// Joint frequencies of the signs of the net effective attack in two areas.
/// An area whose net change is exactly zero counts as an increase.
struct AreaTable {
  int area_a = 1, area_b = 2;
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};  // [a decreases][b decreases]
  std::size_t total = 0;
  double probability(bool a_increase, bool b_increase) const;
};

AreaTable area_change_probability(std::span<const SampleRecord> records,
                                  std::span<const int> bus_area);

enum class Regime { secure, moderate, high };
Regime vulnerability_regime(double nu);
std::string_view to_string(Regime regime);

struct CampaignSummary {
  double nu = 0.0;
  Regime regime = Regime::secure;
  double acceptance_rate = 0.0;
  ErRates rates;
  std::vector<NodeHistogram> histograms;
  AreaTable areas;
};

CampaignSummary summarize(std::span<const SampleRecord> records, const NetworkModel& network,
                          const DensityParams& density, double nu,
                          const HistogramGrid& grid = {});

/// Fraction of non-initial records whose proposal was accepted.
double acceptance_rate(std::span<const SampleRecord> records);

}  // namespace laa
