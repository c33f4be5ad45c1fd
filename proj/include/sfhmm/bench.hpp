#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfhmm/graph.hpp"
#include "sfhmm/kernels.hpp"

namespace sfhmm {

enum class BenchMode { sparse, dense };

BenchMode bench_mode_from_string(const std::string& s);
std::string to_string(BenchMode m);

DependencyGraph bench_graph(int N, BenchMode mode, int neighbor_bound);

struct BenchOptions {
  int T = 2000;
  int K = 5;
  int L = 3;
  int repeats = 5;
  // Neighbor bound M of sparse mode: M >= N - 1 gives the complete graph,
  // M >= 5 the 2 x N/2 lattice, M >= 2 a path, smaller values no edges.
  int neighbor_bound = 5;
  std::uint64_t seed = 7;
};

struct BenchRow {
  int N = 0;
  int max_neighbors = 0;
  double serial_ms = 0.0;    // minimum over repeats
  double parallel_ms = 0.0;  // minimum over repeats
};

// Times one all-channel likelihood pass (every channel against every
// library state). Sparse mode uses the graph picked by the neighbor bound,
// dense mode the complete graph; event covariances are HIW draws on it.
std::vector<BenchRow> bench_likelihoods(const std::vector<int>& sizes, BenchMode mode, const BenchOptions& opts = {});

// Time growth per doubling of N between consecutive rows:
// (t2 / t1)^(log 2 / log(N2 / N1)). Entry j compares rows j and j + 1.
std::vector<double> doubling_ratios(const std::vector<BenchRow>& rows, bool parallel = false);

}  // namespace sfhmm
