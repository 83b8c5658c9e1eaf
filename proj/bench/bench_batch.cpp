#include "laa/batch.hpp"
#include "laa/config.hpp"

#include <omp.h>

#include <chrono>
#include <iostream>
#include <random>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: laa_bench CONFIG [scenarios]\n";
    return 2;
  }
  const auto cfg = laa::load_campaign(argv[1]);
  const std::size_t count = argc > 2 ? std::stoul(argv[2]) : 64;
  const laa::Simulator sim(cfg.preset.network, cfg.thresholds(), cfg.simulation);
  const std::size_t n = sim.network().bus_count();

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eta(-1.0, 1.0);
  std::vector<laa::Scenario> scenarios(count);
  for (auto& s : scenarios) {
    s.eta.resize(n);
    for (auto& e : s.eta) e = eta(rng);
  }

  auto time = [](auto&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    return std::make_pair(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                          std::move(r));
  };
  const auto [serial_s, serial] = time([&] { return laa::run_batch_serial(sim, scenarios); });
  const auto [parallel_s, parallel] = time([&] { return laa::run_batch(sim, scenarios); });

  bool same = serial.size() == parallel.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i)
    same = serial[i].failure == parallel[i].failure && serial[i].counts == parallel[i].counts &&
           serial[i].final_time == parallel[i].final_time;

  std::cout << "scenarios " << count << ", threads " << omp_get_max_threads() << '\n'
            << "serial   " << serial_s << " s (" << serial_s / count * 1e3 << " ms/scenario)\n"
            << "parallel " << parallel_s << " s (" << parallel_s / count * 1e3 << " ms/scenario)\n"
            << "speedup  " << serial_s / parallel_s << '\n'
            << "outcomes " << (same ? "identical" : "DIFFER") << '\n';
  return same ? 0 : 1;
}
