#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "sfhmm/event_data.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/model.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// Event state l has precision event_scale[l] * (I + event_coupling[l] * Adj)
// on the grid graph, so its inverse covariance carries the graph's zero
// pattern. A negative coupling gives positive neighbor correlations. The
// defaults separate the three states by a factor 9 in scale and by the sign
// of the correlations.
struct SimulationSpec {
  int T = 2000;
  int grid_rows = 2;
  int grid_cols = 3;
  std::vector<double> ar_values{-0.9, -0.45, 0.0, 0.45, 0.9};  // first-order
  std::vector<double> event_scale{1.0, 1.0 / 9.0, 9.0};
  std::vector<double> event_coupling{0.0, -0.24, 0.24};
  double channel_self = 0.99;
  double event_self = 0.9;
  double alpha_c = 10.0;
  std::uint64_t seed = 1;

  int N() const { return grid_rows * grid_cols; }
  int K() const { return static_cast<int>(ar_values.size()); }
  int L() const { return static_cast<int>(event_scale.size()); }
  void validate() const;
};

// Flat key=value file with the field names above; lists are comma separated.
SimulationSpec load_simulation_spec(const std::filesystem::path& path, SimulationSpec base = {});
void apply_simulation_value(SimulationSpec& spec, const std::string& key, const std::string& value);

struct SimulationTruth {
  Eigen::MatrixXi F;  // N x K
  Eigen::MatrixXi z;  // T x N
  Eigen::VectorXi Z;  // T
  Eigen::MatrixXd A;  // K x 1
  std::vector<Eigen::MatrixXd> deltas;  // L event covariances
  Eigen::MatrixXd channel_transitions;  // K x K before feature restriction
  Eigen::MatrixXd event_transitions;    // L x L
};

struct Simulation {
  EventData data;
  std::shared_ptr<const DependencyGraph> graph;
  SimulationTruth truth;
};

// Fixed transition rows: self probability on the diagonal, the rest uniform.
Eigen::MatrixXd sticky_uniform_transitions(int n, double self);
// Features from an IBP(alpha_c) over N customers, kept to the first K
// dishes; the draw is repeated until every channel has an active state.
Eigen::MatrixXi simulate_features(int N, int K, double alpha_c, Rng& rng);
Simulation simulate(const SimulationSpec& spec, Rng& rng);

// events/event_0.csv, graph.txt and truth/{F, z_0, Z_0, A, Delta_<l>}.csv
// under dir.
// Key=value text that load_simulation_spec reads back.
std::string simulation_spec_text(const SimulationSpec& spec);

void write_simulation(const std::filesystem::path& dir, const Simulation& sim);

}  // namespace sfhmm
