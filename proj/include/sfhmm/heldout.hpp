#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sfhmm/config.hpp"
#include "sfhmm/event_data.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/model.hpp"
#include "sfhmm/store.hpp"

namespace sfhmm {

struct HeldoutResult {
  std::vector<double> per_sample;  // log p(y_heldout | training sample)
  double mean = 0.0;
  int timepoints = 0;              // T - r terms in each likelihood
  double per_timepoint() const { return mean / timepoints; }
};

// For each training sample a secondary chain on the held-out event samples
// f, eta, z, Z, beta and phi with the AR library, the covariances and the
// hyperparameters frozen. Feature births are off; the training channels
// enter the feature prior as extra customers. Each secondary chain averages
// p(y | z, phi, A, Delta), with Z summed out, over its retained iterations
// in log-mean-exp form. Training sample j uses the stream (seed, j).
HeldoutResult heldout_loglik(const std::vector<ModelState>& train, const ModelConfig& cfg, const EventData& heldout,
                             std::shared_ptr<const DependencyGraph> graph, std::uint64_t seed,
                             Exec exec = Exec::parallel);
HeldoutResult heldout_loglik(const ChainStore& train, const EventData& heldout, std::uint64_t seed,
                             Exec exec = Exec::parallel);

// Mean over samples of sum_e log p(y_e | z, phi, A, Delta) on the training
// data itself, divided by the number of likelihood terms.
double training_loglik_per_timepoint(const std::vector<ModelState>& train, const ModelConfig& cfg,
                                     const Dataset& data);

double log_mean_exp(const std::vector<double>& v);

}  // namespace sfhmm
