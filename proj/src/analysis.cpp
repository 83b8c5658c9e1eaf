#include "laa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace laa {

namespace {

void require_nonempty(std::span<const SampleRecord> records) {
  if (records.empty()) throw AnalysisError("empty sample");
}

}  // namespace

ErRates er_rates(std::span<const SampleRecord> records, std::size_t buses, std::size_t lines) {
  require_nonempty(records);
  ErRates out;
  out.sample_size = records.size();
  const double n = static_cast<double>(records.size());

  auto add = [&](ErKind kind, std::size_t count, auto field) {
    for (std::size_t loc = 0; loc < count; ++loc) {
      long total = 0;
      for (const auto& r : records) {
        const auto& v = r.*field;
        if (v.size() != count) throw AnalysisError("record has inconsistent event columns");
        total += v[loc];
      }
      const double rate = static_cast<double>(total) / n;
      out.per_location.push_back({kind, loc, rate});
      out.aggregate[static_cast<int>(kind) - 1] += rate;
    }
  };
  add(ErKind::rigs, buses, &SampleRecord::rigs);
  add(ErKind::ofgs, buses, &SampleRecord::ofgs);
  add(ErKind::ufls, buses, &SampleRecord::ufls);
  add(ErKind::line_trip, lines, &SampleRecord::line_trip);
  return out;
}

std::size_t NodeHistogram::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::vector<NodeHistogram> conditional_histograms(std::span<const SampleRecord> records,
                                                  const DensityParams& density,
                                                  const HistogramGrid& grid) {
  require_nonempty(records);
  if (grid.bins == 0 || !(grid.lower > 0.0) || !(grid.upper > grid.lower))
    throw AnalysisError("invalid histogram grid");
  const std::size_t nodes = density.dimension();
  const double log_lo = std::log(grid.lower), log_hi = std::log(grid.upper);
  const double width = (log_hi - log_lo) / static_cast<double>(grid.bins);

  std::vector<double> edges(grid.bins + 1);
  for (std::size_t b = 0; b <= grid.bins; ++b) edges[b] = std::exp(log_lo + width * b);
  edges.front() = grid.lower;
  edges.back() = grid.upper;

  std::vector<NodeHistogram> out(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    auto& h = out[i];
    h.node = i;
    h.edges = edges;
    h.counts.assign(grid.bins, 0);
    for (const auto& r : records) {
      if (r.attack.size() != nodes) throw AnalysisError("record dimension does not match density");
      const double a = std::abs(r.attack[i]);
      long b = a > 0.0 ? static_cast<long>(std::floor((std::log(a) - log_lo) / width)) : 0;
      b = std::clamp(b, 0L, static_cast<long>(grid.bins) - 1);
      ++h.counts[static_cast<std::size_t>(b)];
    }
    h.reference_mass.resize(grid.bins);
    for (std::size_t b = 0; b < grid.bins; ++b) {
      const double lo = b == 0 ? 0.0 : lognormal_cdf(edges[b], density.mu[i], density.sigma[i]);
      const double hi = b + 1 == grid.bins ? 1.0
                                           : lognormal_cdf(edges[b + 1], density.mu[i], density.sigma[i]);
      h.reference_mass[b] = hi - lo;
    }
  }
  return out;
}

double AreaTable::probability(bool a_increase, bool b_increase) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[a_increase ? 0 : 1][b_increase ? 0 : 1]) /
         static_cast<double>(total);
}

AreaTable area_change_probability(std::span<const SampleRecord> records,
                                  std::span<const int> bus_area) {
  require_nonempty(records);
  std::set<int> areas(bus_area.begin(), bus_area.end());
  if (areas.size() != 2) throw AnalysisError("area table needs exactly two areas");
  AreaTable t;
  t.area_a = *areas.begin();
  t.area_b = *areas.rbegin();
  for (const auto& r : records) {
    if (r.effective.size() != bus_area.size())
      throw AnalysisError("area partition does not cover the record's buses");
    double net_a = 0.0, net_b = 0.0;
    for (std::size_t i = 0; i < bus_area.size(); ++i)
      (bus_area[i] == t.area_a ? net_a : net_b) += r.effective[i];
    ++t.counts[net_a < 0.0 ? 1 : 0][net_b < 0.0 ? 1 : 0];
  }
  t.total = records.size();
  return t;
}

Regime vulnerability_regime(double nu) {
  if (nu <= 0.45) return Regime::secure;
  if (nu <= 0.65) return Regime::moderate;
  return Regime::high;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::secure: return "secure";
    case Regime::moderate: return "moderate";
    case Regime::high: return "high";
  }
  return "unknown";
}

double acceptance_rate(std::span<const SampleRecord> records) {
  if (records.size() < 2) return 0.0;
  std::size_t accepted = 0;
  for (std::size_t k = 1; k < records.size(); ++k) accepted += records[k].accepted;
  return static_cast<double>(accepted) / static_cast<double>(records.size() - 1);
}

CampaignSummary summarize(std::span<const SampleRecord> records, const NetworkModel& network,
                          const DensityParams& density, double nu, const HistogramGrid& grid) {
  CampaignSummary s;
  s.nu = nu;
  s.regime = vulnerability_regime(nu);
  s.acceptance_rate = acceptance_rate(records);
  s.rates = er_rates(records, network.bus_count(), network.lines.size());
  s.histograms = conditional_histograms(records, density, grid);
  std::vector<int> areas;
  for (const auto& b : network.buses) areas.push_back(b.area);
  s.areas = area_change_probability(records, areas);
  return s;
}

}  // namespace laa
