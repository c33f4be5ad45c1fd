#include "sfhmm/heldout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfhmm/channel.hpp"
#include "sfhmm/errors.hpp"

namespace sfhmm {

double log_mean_exp(const std::vector<double>& v) {
  if (v.empty()) throw PreconditionError("log_mean_exp of an empty set");
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s / static_cast<double>(v.size()));
}

HeldoutResult heldout_loglik(const std::vector<ModelState>& train, const ModelConfig& cfg, const EventData& heldout,
                             std::shared_ptr<const DependencyGraph> graph, std::uint64_t seed, Exec exec) {
  if (train.empty()) throw PreconditionError("no training samples");
  cfg.validate();
  const int N = heldout.N();
  if (N != graph->node_count())
    throw ConfigError("held-out event has " + std::to_string(N) + " channels, graph has " +
                      std::to_string(graph->node_count()) + " nodes");
  for (const auto& s : train) {
    if (s.deltas.size() != 1)
      throw PreconditionError("held-out evaluation needs covariances shared across training events");
    if (s.deltas[0].empty() || s.deltas[0][0].rows() != N)
      throw ConfigError("held-out event dimension does not match the training covariances");
    if (static_cast<int>(s.deltas[0].size()) != cfg.L) throw ConfigError("training sample has a different L");
  }
  if (heldout.T() < cfg.ar_order + 1) throw PreconditionError("held-out event shorter than ar_order + 1");

  const Dataset data = make_dataset({heldout}, graph);
  ModelConfig hc = cfg;
  hc.share_deltas = true;
  HeldoutResult out;
  out.per_sample.assign(train.size(), 0.0);
  out.timepoints = heldout.T() - cfg.ar_order;
  std::vector<std::string> errors(train.size());
  const long S = static_cast<long>(train.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long j = 0; j < S; ++j) {
    try {
      const ModelState& tr = train[j];
      SamplerOptions opts;
      opts.births = false;
      opts.update_ar = false;
      opts.update_deltas = false;
      opts.update_channel_hypers = false;
      opts.update_event_hypers = false;
      opts.ibp_extra_counts = tr.feature_usage();
      for (const auto& ev : tr.events) opts.ibp_extra_customers += static_cast<int>(ev.F.rows());

      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(j));
      const int K = tr.K();
      const int top = static_cast<int>(std::max_element(opts.ibp_extra_counts.begin(), opts.ibp_extra_counts.end()) -
                                       opts.ibp_extra_counts.begin());
      ModelState st;
      st.A = tr.A;
      st.hyper = tr.hyper;
      st.deltas = {tr.deltas[0]};
      EventLatent ev;
      ev.F = Eigen::MatrixXi::Zero(N, K);
      ev.F.col(top).setOnes();
      for (int i = 0; i < N; ++i) ev.log_eta.push_back(sample_log_eta_prior(K, tr.hyper.gamma_c, tr.hyper.kappa_c, rng));
      ev.z = Eigen::MatrixXi::Constant(heldout.T(), N, top);
      ev.Z = Eigen::VectorXi::Zero(heldout.T());
      ev.beta = tr.events[0].beta;
      ev.phi = tr.events[0].phi;
      st.events.push_back(std::move(ev));

      Sampler s(data, hc, std::move(rng), std::move(opts));
      s.set_state(std::move(st));
      s.sweep_events();
      std::vector<double> vals;
      for (int it = 1; it <= cfg.heldout_iterations; ++it) {
        s.iterate();
        if (it > cfg.heldout_burn_in && (it - cfg.heldout_burn_in) % cfg.heldout_thin == 0)
          vals.push_back(s.event_loglik_given_channels(0));
      }
      out.per_sample[j] = log_mean_exp(vals);
    } catch (const std::exception& ex) {
      errors[j] = "training sample " + std::to_string(j) + ": " + ex.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  double sum = 0.0;
  for (double v : out.per_sample) sum += v;
  out.mean = sum / static_cast<double>(S);
  return out;
}

HeldoutResult heldout_loglik(const ChainStore& train, const EventData& heldout, std::uint64_t seed, Exec exec) {
  if (train.index().empty()) throw PreconditionError("training store holds no samples");
  std::vector<ModelState> samples;
  for (const auto& k : train.index()) samples.push_back(train.load(k));
  auto graph = train.graphs().empty() ? nullptr : train.graphs()[0];
  if (!graph) throw PreconditionError("training store has no graph");
  return heldout_loglik(samples, train.config(), heldout, graph, seed, exec);
}

double training_loglik_per_timepoint(const std::vector<ModelState>& train, const ModelConfig& cfg,
                                     const Dataset& data) {
  if (train.empty()) throw PreconditionError("no training samples");
  long terms = 0;
  for (const auto& ev : data.events) terms += ev.T() - cfg.ar_order;
  double total = 0.0;
  for (const auto& st : train) {
    Sampler s(data, cfg, Rng(0));
    s.set_state(st);
    for (int e = 0; e < static_cast<int>(data.events.size()); ++e) total += s.event_loglik_given_channels(e);
  }
  return total / static_cast<double>(train.size()) / static_cast<double>(terms);
}

}  // namespace sfhmm
