#include "sfhmm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "sfhmm/errors.hpp"
#include "sfhmm/ggm.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

BenchMode bench_mode_from_string(const std::string& s) {
  if (s == "sparse") return BenchMode::sparse;
  if (s == "dense") return BenchMode::dense;
  throw ConfigError("bench mode must be sparse or dense, got " + s);
}

std::string to_string(BenchMode m) { return m == BenchMode::sparse ? "sparse" : "dense"; }

DependencyGraph bench_graph(int N, BenchMode mode, int bound) {
  if (mode == BenchMode::dense || bound >= N - 1) return DependencyGraph::complete(N);
  if (bound >= 5) {
    if (N % 2) throw ConfigError("lattice bench sizes must be even");
    return DependencyGraph::grid(2, N / 2);
  }
  if (bound >= 2) return DependencyGraph::path(N);
  return DependencyGraph::edgeless(N);
}

namespace {

struct BenchCase {
  std::shared_ptr<const DependencyGraph> graph;
  std::vector<SparseCovariance> covs;
  Eigen::MatrixXd y, A, E;
  Eigen::MatrixXi z;
  Eigen::VectorXi Z;
  std::vector<Eigen::MatrixXd> out;

  ChannelLikInputs inputs() const { return ChannelLikInputs{&y, 1, &A, &E, &Z, &covs}; }
};

BenchCase make_case(int N, BenchMode mode, const BenchOptions& opts) {
  BenchCase c;
  Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(N));
  c.graph = std::make_shared<const DependencyGraph>(bench_graph(N, mode, opts.neighbor_bound));
  const double b = N + 3.0;
  const Eigen::MatrixXd D = (b - 2.0) * Eigen::MatrixXd::Identity(N, N);
  for (int l = 0; l < opts.L; ++l) c.covs.push_back(sample_hiw(c.graph, b, D, rng));
  c.y.resize(opts.T, N);
  for (Eigen::Index x = 0; x < c.y.size(); ++x) c.y.data()[x] = rng.normal();
  c.A.resize(opts.K, 1);
  for (int k = 0; k < opts.K; ++k) c.A(k, 0) = -0.9 + 1.8 * rng.uniform();
  c.z.resize(opts.T, N);
  for (Eigen::Index x = 0; x < c.z.size(); ++x) c.z.data()[x] = rng.uniform_int(opts.K);
  c.Z.resize(opts.T);
  for (int t = 0; t < opts.T; ++t) c.Z[t] = rng.uniform_int(opts.L);
  c.E = extract_innovations(c.y, c.z, c.A, 1);
  return c;
}

double time_once(BenchCase& c, Exec exec) {
  const auto t0 = std::chrono::steady_clock::now();
  all_channel_loglik(c.inputs(), c.out, exec);
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<BenchRow> bench_likelihoods(const std::vector<int>& sizes, BenchMode mode, const BenchOptions& opts) {
  if (opts.T < 2 || opts.K < 1 || opts.L < 1 || opts.repeats < 1) throw ConfigError("invalid bench options");
  std::vector<BenchCase> cases;
  std::vector<BenchRow> rows;
  for (int N : sizes) {
    if (N < 2) throw ConfigError("bench sizes must be >= 2");
    cases.push_back(make_case(N, mode, opts));
    BenchRow row;
    row.N = N;
    for (int i = 0; i < N; ++i)
      row.max_neighbors = std::max(row.max_neighbors, static_cast<int>(cases.back().graph->neighbors(i).size()));
    row.serial_ms = row.parallel_ms = std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  for (auto& c : cases) {
    all_channel_loglik(c.inputs(), c.out, Exec::serial);  // warm-up
    all_channel_loglik(c.inputs(), c.out, Exec::parallel);
  }
  // Repeats are interleaved across sizes so a slow phase of the machine
  // hits every size alike; the minimum estimates the undisturbed cost.
  for (int rep = 0; rep < opts.repeats; ++rep)
    for (std::size_t j = 0; j < cases.size(); ++j) {
      rows[j].serial_ms = std::min(rows[j].serial_ms, time_once(cases[j], Exec::serial));
      rows[j].parallel_ms = std::min(rows[j].parallel_ms, time_once(cases[j], Exec::parallel));
    }
  return rows;
}

std::vector<double> doubling_ratios(const std::vector<BenchRow>& rows, bool parallel) {
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
    const double t1 = parallel ? rows[j].parallel_ms : rows[j].serial_ms;
    const double t2 = parallel ? rows[j + 1].parallel_ms : rows[j + 1].serial_ms;
    const double growth = static_cast<double>(rows[j + 1].N) / rows[j].N;
    out.push_back(std::pow(t2 / t1, std::log(2.0) / std::log(growth)));
  }
  return out;
}

}  // namespace sfhmm
