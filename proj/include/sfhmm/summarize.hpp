#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sfhmm/kernels.hpp"
#include "sfhmm/model.hpp"
#include "sfhmm/store.hpp"

namespace sfhmm {

// Assignment maximizing the total weight of a rows x cols matrix. Returns
// for each row its column, or -1 when rows > cols and the row is unmatched.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

struct LabelMatching {
  std::vector<int> map;  // label of a -> label of b (-1 unmatched)
  long overlap = 0;      // positions that agree after relabelling
};

// Relabels a (labels in [0, na)) onto b (labels in [0, nb)) maximizing the
// number of agreeing positions; the co-occurrence matrix is the weight.
LabelMatching match_labels(std::span<const int> a, std::span<const int> b, int na, int nb);
// Disagreeing positions after the optimal relabelling.
long matched_hamming(std::span<const int> a, std::span<const int> b, int na, int nb);

// Event-state labels of all events stacked in event order.
std::vector<int> stacked_event_states(const ModelState& s);
// Channel-state labels of all events and channels stacked.
std::vector<int> stacked_channel_states(const ModelState& s);

// Event Hamming plus channel Hamming after separate label matchings.
long parsing_distance(const ModelState& a, const ModelState& b, int L);

struct SummaryOptions {
  // Expected distances are taken against at most this many evenly spaced
  // reference samples; 0 means all.
  int max_reference = 200;
  Exec exec = Exec::parallel;
};

struct ParsingSummary {
  std::size_t best = 0;
  std::vector<double> expected_distance;  // per sample
  std::vector<std::size_t> reference;     // indices used as the ensemble
  Eigen::VectorXd event_occupancy;        // L, fraction of time of the best sample
  Eigen::VectorXd channel_occupancy;      // K of the best sample
};

// Sample with the minimum expected label-matched Hamming distance to the
// ensemble. Throws PreconditionError on an empty ensemble.
ParsingSummary summarize_samples(const std::vector<ModelState>& samples, int L, const SummaryOptions& opts = {});

// Loads every indexed sample of the store and summarizes them.
struct StoreSummary {
  ParsingSummary summary;
  SampleKey best_key;
  ModelState best;
};
StoreSummary summarize_store(const ChainStore& store, const SummaryOptions& opts = {});

// z_<e>.csv, Z_<e>.csv, A.csv, Delta_<l>.csv (occupied states), occupancy
// tables and summary.json under dir.
void write_summary(const std::filesystem::path& dir, const ChainStore& store, const StoreSummary& s);

}  // namespace sfhmm
