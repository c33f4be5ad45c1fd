#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sfhmm/config.hpp"
#include "sfhmm/event_data.hpp"
#include "sfhmm/ggm.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/hyper.hpp"
#include "sfhmm/kernels.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// Latent variables of one event. Feature indices are global library slots.
struct EventLatent {
  Eigen::MatrixXi F;                   // N x K, 0/1
  std::vector<Eigen::MatrixXd> log_eta;  // per channel, K x K
  Eigen::MatrixXi z;                   // T x N
  Eigen::VectorXi Z;                   // T, event states in [0, L)
  Eigen::VectorXd beta;                // L
  Eigen::MatrixXd phi;                 // L x L
};

struct ModelState {
  Eigen::MatrixXd A;  // K x r
  std::vector<EventLatent> events;
  std::vector<std::vector<Eigen::MatrixXd>> deltas;  // group -> L covariances
  Hyperparameters hyper;
  long iteration = 0;

  int K() const { return static_cast<int>(A.rows()); }
  // Number of channels (over all events) holding each feature.
  std::vector<int> feature_usage() const;
  // Throws Error describing the first violated invariant.
  void check_invariants(int L) const;
};

struct Dataset {
  std::vector<EventData> events;
  std::vector<std::shared_ptr<const DependencyGraph>> graphs;  // one per event

  int total_channels() const;
};

Dataset make_dataset(std::vector<EventData> events, std::shared_ptr<const DependencyGraph> graph);

struct SamplerOptions {
  bool births = true;
  bool update_ar = true;
  bool update_deltas = true;
  bool update_channel_hypers = true;
  bool update_event_hypers = true;
  // Extra IBP customers and their feature counts (frozen training events).
  int ibp_extra_customers = 0;
  std::vector<int> ibp_extra_counts;
  Exec exec = Exec::serial;
};

struct SweepStats {
  long shared_proposed = 0, shared_accepted = 0;
  long births_proposed = 0, births_accepted = 0;
  long deaths_proposed = 0, deaths_accepted = 0;
  long gamma_c_accepted = 0, kappa_c_accepted = 0, alpha_c_accepted = 0;
};

// Gibbs/MH sampler over all latent variables of a multi-event dataset.
class Sampler {
 public:
  Sampler(const Dataset& data, const ModelConfig& cfg, Rng rng, SamplerOptions opts = {});

  // Fresh state: one shared feature, z and Z from their priors, hyper-
  // parameters at prior means, Delta from its full conditional.
  void initialize();
  void set_state(ModelState state);
  const ModelState& state() const { return state_; }

  // One full sweep: channels (f, z, eta) in random order per event; event
  // layer (Z, tables, event hyperparameters, beta, phi); AR library; Delta;
  // channel hyperparameters.
  void iterate();
  // Call after the dataset's observations were modified in place.
  void data_changed();

  void sweep_channels();
  void sweep_events();
  void sweep_ar();
  void sweep_deltas();
  void sweep_channel_hypers();

  const ResolvedPriors& priors(int group) const { return priors_[group]; }
  int group_of(int event) const { return cfg_.share_deltas ? 0 : event; }
  int group_count() const { return static_cast<int>(priors_.size()); }
  const std::vector<SparseCovariance>& covs(int group) const { return covs_[group]; }
  const Eigen::MatrixXd& innovations(int event) const { return E_[event]; }
  const SweepStats& stats() const { return stats_; }
  Rng& rng() { return rng_; }
  const ModelConfig& config() const { return cfg_; }
  const Dataset& data() const { return data_; }

  // log p(y_e | z, phi, A, Delta) with Z summed out.
  double event_loglik_given_channels(int event) const;

 private:
  void channel_step(int e, int i);
  void prune_features();
  void rebuild_covs(int group);
  void recompute_innovations();
  std::vector<int> usage_with_extra() const;
  int total_customers() const;
  void append_feature(const Eigen::VectorXd& a, int e, int i, const Eigen::MatrixXd& log_eta_i);

  const Dataset& data_;
  ModelConfig cfg_;
  Rng rng_;
  SamplerOptions opts_;
  std::vector<ResolvedPriors> priors_;
  ModelState state_;
  std::vector<std::vector<SparseCovariance>> covs_;
  std::vector<Eigen::MatrixXd> E_;
  SweepStats stats_;
};

// Starting value of a hyperparameter: init_* from the config when set,
// otherwise the prior mean.
Hyperparameters initial_hyperparameters(const ModelConfig& cfg);
std::vector<ResolvedPriors> resolve_group_priors(const Dataset& data, const ModelConfig& cfg);

// Draws every latent variable from the prior (features from the IBP with
// rejection of empty rows) and the data given them. Used by the joint
// distribution tests; the events' y are overwritten.
ModelState sample_prior_state(Dataset& data, const ModelConfig& cfg, const std::vector<ResolvedPriors>& priors,
                              Rng& rng);
// Markov chain of length T with a uniform initial state.
Eigen::VectorXi sample_markov_chain(const Eigen::MatrixXd& P, int T, Rng& rng);
// y_{t<r} ~ N(0, 1); later rows from the AR model with correlated innovations.
void sample_data_given_state(Dataset& data, const ModelState& s, const ModelConfig& cfg, Rng& rng);

}  // namespace sfhmm
