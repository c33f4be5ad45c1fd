// Serial reference against OpenMP kernels: the all-channel likelihood pass
// in sparse and dense mode, then whole sampler sweeps on simulated data.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfhmm/bench.hpp"
#include "sfhmm/model.hpp"
#include "sfhmm/simulate.hpp"

using namespace sfhmm;

namespace {

double sweep_ms(const Dataset& data, const ModelConfig& cfg, Exec exec, int sweeps) {
  SamplerOptions opts;
  opts.exec = exec;
  Sampler s(data, cfg, Rng(cfg.seed), opts);
  s.initialize();
  s.iterate();
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < sweeps; ++k) s.iterate();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / sweeps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood and sweep timings, serial vs parallel"};
  std::vector<int> sizes = {8, 16, 32, 64, 96};
  BenchOptions opts;
  int sweeps = 20;
  int sweep_T = 2000;
  app.add_option("--sizes", sizes, "Channel counts")->delimiter(',');
  app.add_option("--T", opts.T, "Time points of the likelihood pass");
  app.add_option("--K", opts.K, "AR library size");
  app.add_option("--repeats", opts.repeats, "Timed repeats (minimum reported)");
  app.add_option("--sweeps", sweeps, "Timed sampler sweeps");
  app.add_option("--sweep-T", sweep_T, "Time points of the simulated sweep data");
  CLI11_PARSE(app, argc, argv);

  std::printf("pass,mode,N,serial_ms,parallel_ms,speedup\n");
  for (BenchMode mode : {BenchMode::sparse, BenchMode::dense}) {
    for (const auto& r : bench_likelihoods(sizes, mode, opts))
      std::printf("likelihood,%s,%d,%.4f,%.4f,%.3f\n", to_string(mode).c_str(), r.N, r.serial_ms, r.parallel_ms,
                  r.serial_ms / r.parallel_ms);
  }

  SimulationSpec spec;
  spec.T = sweep_T;
  Rng rng(spec.seed);
  Simulation sim = simulate(spec, rng);
  Dataset data = make_dataset({sim.data}, sim.graph);
  ModelConfig cfg;
  const double serial = sweep_ms(data, cfg, Exec::serial, sweeps);
  const double parallel = sweep_ms(data, cfg, Exec::parallel, sweeps);
  std::printf("sweep,sparse,%d,%.4f,%.4f,%.3f\n", sim.data.N(), serial, parallel, serial / parallel);
  return 0;
}
