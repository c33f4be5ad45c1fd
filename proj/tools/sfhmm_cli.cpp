#include <algorithm>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfhmm/bench.hpp"
#include "sfhmm/chain.hpp"
#include "sfhmm/config.hpp"
#include "sfhmm/errors.hpp"
#include "sfhmm/event_data.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/heldout.hpp"
#include "sfhmm/simulate.hpp"
#include "sfhmm/store.hpp"
#include "sfhmm/summarize.hpp"

namespace fs = std::filesystem;
using namespace sfhmm;

namespace {

std::vector<fs::path> event_files(const fs::path& data) {
  if (!fs::exists(data)) throw NotFoundError("data path does not exist: " + data.string());
  if (!fs::is_directory(data)) return {data};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(data)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".bin" || ext == ".sfev")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw NotFoundError("no event files in " + data.string());
  return files;
}

void apply_overrides(ModelConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
    apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad size list: " + s);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse factorial BP-AR-HMM: simulation, MCMC fitting, summaries, held-out scoring, benchmarks"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Simulate a dataset from a key=value spec");
  std::string sim_spec, sim_out;
  long sim_seed = -1;
  sim->add_option("--spec", sim_spec, "Simulation spec file (defaults used when omitted)");
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--seed", sim_seed, "Overrides the spec seed");

  auto* fit = app.add_subcommand("fit", "Run MCMC chains and write a sample store");
  std::string fit_data, fit_graph, fit_config, fit_out;
  int fit_chains = 0;
  long fit_iters = -1, fit_seed = -1;
  std::vector<std::string> fit_sets;
  bool fit_progress = false, fit_parallel = false;
  fit->add_option("--data", fit_data, "Event file or directory of event files")->required();
  fit->add_option("--graph", fit_graph, "Edge list of the channel dependency graph")->required();
  fit->add_option("--config", fit_config, "key=value model configuration");
  fit->add_option("--chains", fit_chains, "Number of chains");
  fit->add_option("--iterations", fit_iters, "MCMC iterations per chain");
  fit->add_option("--seed", fit_seed, "Random seed");
  fit->add_option("--set", fit_sets, "Extra key=value overrides");
  fit->add_option("--out", fit_out, "Store directory")->required();
  fit->add_flag("--progress", fit_progress, "Report progress every 100 iterations");
  fit->add_flag("--parallel-kernels", fit_parallel, "Use the OpenMP likelihood kernels within a chain");

  auto* sum = app.add_subcommand("summarize", "Minimum expected Hamming distance summary of a store");
  std::string sum_store, sum_out;
  int sum_ref = 200;
  sum->add_option("--store", sum_store, "Store directory")->required();
  sum->add_option("--out", sum_out, "Output directory")->required();
  sum->add_option("--max-reference", sum_ref, "Reference samples for expected distances (0 = all)");

  auto* ho = app.add_subcommand("heldout", "Held-out log-likelihood of an event under a fitted store");
  std::string ho_store, ho_data;
  long ho_seed = 1;
  ho->add_option("--store", ho_store, "Training store")->required();
  ho->add_option("--data", ho_data, "Held-out event file")->required();
  ho->add_option("--seed", ho_seed, "Seed of the secondary chains");

  auto* bench = app.add_subcommand("bench", "Time the all-channel likelihood pass");
  std::string bench_sizes = "8,16,32,64,96", bench_mode = "sparse";
  BenchOptions bopts;
  bench->add_option("--sizes", bench_sizes, "Comma separated channel counts");
  bench->add_option("--mode", bench_mode, "sparse or dense");
  bench->add_option("--T", bopts.T, "Time points");
  bench->add_option("--K", bopts.K, "AR library size");
  bench->add_option("--L", bopts.L, "Event states");
  bench->add_option("--repeats", bopts.repeats, "Timed repeats (minimum reported)");
  bench->add_option("--neighbors", bopts.neighbor_bound, "Neighbor bound of sparse mode");

  auto* pre = app.add_subcommand("preprocess", "Low-pass, decimate and scale an event");
  std::string pre_in, pre_out;
  double pre_rate = 0.0, pre_q = 0.95, pre_source = 0.0;
  pre->add_option("--in", pre_in, "Raw event file")->required();
  pre->add_option("--out", pre_out, "Output event file")->required();
  pre->add_option("--rate", pre_rate, "Target sample rate in Hz")->required();
  pre->add_option("--source-rate", pre_source, "Sample rate of the input (CSV files carry none)");
  pre->add_option("--scale-quantile", pre_q, "Quantile of |y| mapped to 10");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      SimulationSpec spec = sim_spec.empty() ? SimulationSpec{} : load_simulation_spec(sim_spec);
      if (sim_seed >= 0) spec.seed = static_cast<std::uint64_t>(sim_seed);
      Rng rng(spec.seed);
      Simulation s = simulate(spec, rng);
      write_simulation(sim_out, s);
      std::ofstream(fs::path(sim_out) / "spec.txt") << simulation_spec_text(spec);
      std::cout << "simulated T=" << spec.T << " N=" << spec.N() << " into " << sim_out << "\n";
    } else if (*fit) {
      ModelConfig cfg = fit_config.empty() ? ModelConfig{} : load_config(fit_config);
      if (fit_chains > 0) cfg.chains = fit_chains;
      if (fit_iters >= 0) cfg.iterations = static_cast<int>(fit_iters);
      if (fit_seed >= 0) cfg.seed = static_cast<std::uint64_t>(fit_seed);
      apply_overrides(cfg, fit_sets);
      cfg.validate();
      std::vector<EventData> events;
      for (const auto& f : event_files(fit_data)) events.push_back(load_event(f, cfg.ar_order));
      const int N = events.front().N();
      auto graph = std::make_shared<const DependencyGraph>(build_graph(fit_graph, N));
      Dataset data = make_dataset(std::move(events), graph);
      SamplerOptions opts;
      opts.exec = fit_parallel ? Exec::parallel : Exec::serial;
      ProgressFn progress;
      if (fit_progress)
        progress = [&](int c, long it) {
          if (it % 100 == 0) {
#pragma omp critical(sfhmm_progress)
            std::cerr << "chain " << c << " iteration " << it << "/" << cfg.iterations << "\n";
          }
        };
      ChainStore store = run_chains(data, cfg, fit_out, opts, progress);
      std::cout << "wrote " << store.index().size() << " samples to " << fit_out << "\n";
    } else if (*sum) {
      ChainStore store = ChainStore::open(sum_store);
      SummaryOptions so;
      so.max_reference = sum_ref;
      StoreSummary s = summarize_store(store, so);
      write_summary(sum_out, store, s);
      std::cout << "best sample chain " << s.best_key.chain << " iteration " << s.best_key.iteration
                << " expected distance " << s.summary.expected_distance[s.summary.best] << "\n";
      std::cout << "event occupancy:";
      for (Eigen::Index l = 0; l < s.summary.event_occupancy.size(); ++l)
        if (s.summary.event_occupancy[l] > 0) std::cout << " " << l << ":" << s.summary.event_occupancy[l];
      std::cout << "\n";
    } else if (*ho) {
      ChainStore store = ChainStore::open(ho_store);
      EventData ev = load_event(ho_data, store.config().ar_order);
      HeldoutResult r = heldout_loglik(store, ev, static_cast<std::uint64_t>(ho_seed));
      std::cout << "sample,loglik\n";
      for (std::size_t j = 0; j < r.per_sample.size(); ++j) std::cout << j << "," << r.per_sample[j] << "\n";
      std::cout << "mean " << r.mean << " per_timepoint " << r.per_timepoint() << "\n";
    } else if (*bench) {
      const BenchMode mode = bench_mode_from_string(bench_mode);
      auto rows = bench_likelihoods(parse_sizes(bench_sizes), mode, bopts);
      auto ratios = doubling_ratios(rows);
      auto pratios = doubling_ratios(rows, true);
      std::printf("mode,N,max_neighbors,serial_ms,parallel_ms,doubling_serial,doubling_parallel\n");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        std::printf("%s,%d,%d,%.4f,%.4f", to_string(mode).c_str(), rows[j].N, rows[j].max_neighbors,
                    rows[j].serial_ms, rows[j].parallel_ms);
        if (j == 0) std::printf(",,\n");
        else std::printf(",%.3f,%.3f\n", ratios[j - 1], pratios[j - 1]);
      }
    } else if (*pre) {
      EventData raw = load_event(pre_in);
      if (pre_source > 0.0) raw.sample_rate_hz = pre_source;
      EventData out = preprocess(raw, pre_rate, pre_q);
      save_event(pre_out, out, format_from_path(pre_out));
      std::cout << "wrote T=" << out.T() << " N=" << out.N() << " at " << out.sample_rate_hz << " Hz\n";
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
