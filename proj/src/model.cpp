#include "sfhmm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sfhmm/ar.hpp"
#include "sfhmm/channel.hpp"
#include "sfhmm/errors.hpp"
#include "sfhmm/event.hpp"

namespace sfhmm {

namespace {

int draw_row(const Eigen::MatrixXd& P, int row, Rng& rng) {
  Eigen::VectorXd w = P.row(row).transpose();
  return rng.categorical(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
}

}  // namespace

Eigen::VectorXi sample_markov_chain(const Eigen::MatrixXd& P, int T, Rng& rng) {
  Eigen::VectorXi z(T);
  z[0] = rng.uniform_int(static_cast<int>(P.rows()));
  for (int t = 1; t < T; ++t) z[t] = draw_row(P, z[t - 1], rng);
  return z;
}

std::vector<int> ModelState::feature_usage() const {
  std::vector<int> u(K(), 0);
  for (const auto& ev : events)
    for (int i = 0; i < ev.F.rows(); ++i)
      for (int k = 0; k < ev.F.cols(); ++k) u[k] += ev.F(i, k);
  return u;
}

void ModelState::check_invariants(int L) const {
  const int K = this->K();
  if (K < 1) throw Error("library is empty");
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    const std::string tag = "event " + std::to_string(e) + ": ";
    if (ev.F.cols() != K) throw Error(tag + "feature matrix width differs from library size");
    for (int i = 0; i < ev.F.rows(); ++i) {
      if (ev.F.row(i).sum() < 1) throw Error(tag + "channel " + std::to_string(i) + " has no feature");
      if (ev.log_eta[i].rows() != K || ev.log_eta[i].cols() != K) throw Error(tag + "eta size mismatch");
      if (!ev.log_eta[i].allFinite()) throw Error(tag + "non-finite eta");
      for (int t = 0; t < ev.z.rows(); ++t) {
        const int k = ev.z(t, i);
        if (k < 0 || k >= K || ev.F(i, k) != 1)
          throw Error(tag + "state of channel " + std::to_string(i) + " at t=" + std::to_string(t) +
                      " is not an active feature");
      }
    }
    for (int t = 0; t < ev.Z.size(); ++t)
      if (ev.Z[t] < 0 || ev.Z[t] >= L) throw Error(tag + "event state out of range");
    if (std::abs(ev.beta.sum() - 1.0) > 1e-9) throw Error(tag + "beta does not sum to 1");
    for (int l = 0; l < L; ++l)
      if (std::abs(ev.phi.row(l).sum() - 1.0) > 1e-9) throw Error(tag + "phi row does not sum to 1");
  }
  for (int u : feature_usage())
    if (u < 1) throw Error("library holds an unused feature");
}

int Dataset::total_channels() const {
  int n = 0;
  for (const auto& e : events) n += e.N();
  return n;
}

Dataset make_dataset(std::vector<EventData> events, std::shared_ptr<const DependencyGraph> graph) {
  Dataset d;
  for (const auto& e : events)
    if (e.N() != graph->node_count())
      throw ConfigError("event has " + std::to_string(e.N()) + " channels, graph has " +
                        std::to_string(graph->node_count()) + " nodes");
  d.events = std::move(events);
  d.graphs.assign(d.events.size(), graph);
  return d;
}

Hyperparameters initial_hyperparameters(const ModelConfig& cfg) {
  auto pick = [](double init, const GammaPrior& p) { return init > 0.0 ? init : p.a / p.b; };
  Hyperparameters h;
  h.gamma_c = pick(cfg.init_gamma_c, cfg.gamma_c);
  h.kappa_c = pick(cfg.init_kappa_c, cfg.kappa_c);
  h.alpha_c = pick(cfg.init_alpha_c, cfg.alpha_c);
  h.gamma_e = pick(cfg.init_gamma_e, cfg.gamma_e);
  const double s = pick(cfg.init_alpha_kappa_e, cfg.alpha_kappa_e);
  const double rho = cfg.init_rho_e > 0.0 ? cfg.init_rho_e : cfg.rho_e.c / (cfg.rho_e.c + cfg.rho_e.d);
  h.set_event_concentration(s, rho);
  return h;
}

std::vector<ResolvedPriors> resolve_group_priors(const Dataset& data, const ModelConfig& cfg) {
  if (data.events.empty()) throw ConfigError("dataset has no events");
  for (std::size_t e = 0; e < data.events.size(); ++e) {
    if (data.events[e].T() < cfg.ar_order + 1)
      throw PreconditionError("event " + std::to_string(e) + " is shorter than ar_order + 1");
    if (data.graphs[e]->node_count() != data.events[e].N())
      throw ConfigError("event " + std::to_string(e) + " does not match its graph");
  }
  auto stack = [&](const std::vector<int>& ids) {
    long rows = 0;
    for (int e : ids) rows += data.events[e].T();
    Eigen::MatrixXd y(rows, data.events[ids[0]].N());
    long at = 0;
    for (int e : ids) {
      y.middleRows(at, data.events[e].T()) = data.events[e].y;
      at += data.events[e].T();
    }
    return y;
  };
  std::vector<std::vector<int>> groups;
  if (cfg.share_deltas) {
    groups.emplace_back();
    for (std::size_t e = 0; e < data.events.size(); ++e) {
      if (!(*data.graphs[e] == *data.graphs[0]))
        throw ConfigError("share_deltas requires every event to use the same graph");
      groups[0].push_back(static_cast<int>(e));
    }
  } else {
    for (std::size_t e = 0; e < data.events.size(); ++e) groups.push_back({static_cast<int>(e)});
  }
  std::vector<ResolvedPriors> out;
  for (const auto& g : groups) out.push_back(resolve_priors(cfg, data.events[g[0]].N(), stack(g)));
  // AR prior is global: pool every event.
  Eigen::VectorXd all(0);
  {
    long n = 0;
    for (const auto& e : data.events) n += e.y.size();
    all.resize(n);
    long at = 0;
    for (const auto& e : data.events) {
      all.segment(at, e.y.size()) = Eigen::Map<const Eigen::VectorXd>(e.y.data(), e.y.size());
      at += e.y.size();
    }
  }
  ResolvedPriors global = resolve_priors(
      [&] {
        ModelConfig c = cfg;
        c.D0_rule = "identity";
        return c;
      }(),
      out[0].D0.rows(), Eigen::MatrixXd(all));
  for (auto& p : out) {
    p.m0 = global.m0;
    p.Sigma0 = global.Sigma0;
  }
  return out;
}

Sampler::Sampler(const Dataset& data, const ModelConfig& cfg, Rng rng, SamplerOptions opts)
    : data_(data), cfg_(cfg), rng_(std::move(rng)), opts_(std::move(opts)) {
  cfg_.validate();
  priors_ = resolve_group_priors(data_, cfg_);
}

int Sampler::total_customers() const { return data_.total_channels() + opts_.ibp_extra_customers; }

std::vector<int> Sampler::usage_with_extra() const {
  std::vector<int> u = state_.feature_usage();
  for (std::size_t k = 0; k < u.size() && k < opts_.ibp_extra_counts.size(); ++k) u[k] += opts_.ibp_extra_counts[k];
  return u;
}

void Sampler::rebuild_covs(int g) {
  covs_[g].clear();
  for (const auto& D : state_.deltas[g]) covs_[g].emplace_back(data_.graphs[g == 0 && cfg_.share_deltas ? 0 : g], D);
}

void Sampler::recompute_innovations() {
  E_.resize(data_.events.size());
  for (std::size_t e = 0; e < data_.events.size(); ++e)
    E_[e] = extract_innovations(data_.events[e].y, state_.events[e].z, state_.A, cfg_.ar_order);
}

void Sampler::data_changed() { recompute_innovations(); }

void Sampler::initialize() {
  const int L = cfg_.L;
  if (!opts_.ibp_extra_counts.empty())
    throw PreconditionError("initialize() cannot be used with a frozen library");
  state_ = ModelState{};
  state_.hyper = initial_hyperparameters(cfg_);
  const auto& h = state_.hyper;
  Eigen::LLT<Eigen::MatrixXd> s0(priors_[0].Sigma0);
  state_.A = rng_.mvnormal_chol(priors_[0].m0, s0.matrixL()).transpose();
  for (const auto& d : data_.events) {
    EventLatent ev;
    ev.F = Eigen::MatrixXi::Ones(d.N(), 1);
    for (int i = 0; i < d.N(); ++i) ev.log_eta.push_back(sample_log_eta_prior(1, h.gamma_c, h.kappa_c, rng_));
    ev.z = Eigen::MatrixXi::Zero(d.T(), d.N());
    ev.beta = rng_.dirichlet(Eigen::VectorXd::Constant(L, h.gamma_e / L));
    ev.phi = sample_phi(Eigen::MatrixXi::Zero(L, L), ev.beta, h.alpha_e, h.kappa_e, rng_);
    ev.Z = sample_markov_chain(ev.phi, d.T(), rng_);
    state_.events.push_back(std::move(ev));
  }
  recompute_innovations();
  state_.deltas.assign(group_count(), {});
  covs_.assign(group_count(), {});
  sweep_deltas();
}

void Sampler::set_state(ModelState state) {
  state_ = std::move(state);
  if (state_.events.size() != data_.events.size()) throw ConfigError("state does not match dataset");
  if (static_cast<int>(state_.deltas.size()) != group_count())
    throw ConfigError("state covariance groups do not match configuration");
  covs_.assign(group_count(), {});
  for (int g = 0; g < group_count(); ++g) rebuild_covs(g);
  recompute_innovations();
}

void Sampler::iterate() {
  sweep_channels();
  sweep_events();
  if (opts_.update_ar) sweep_ar();
  if (opts_.update_deltas) sweep_deltas();
  if (opts_.update_channel_hypers) sweep_channel_hypers();
  ++state_.iteration;
}

void Sampler::sweep_channels() {
  for (std::size_t e = 0; e < data_.events.size(); ++e) {
    std::vector<int> perm(data_.events[e].N());
    std::iota(perm.begin(), perm.end(), 0);
    shuffle(perm, rng_);
    for (int i : perm) channel_step(static_cast<int>(e), i);
  }
}

void Sampler::append_feature(const Eigen::VectorXd& a, int e, int i, const Eigen::MatrixXd& log_eta_i) {
  const int K = state_.K();
  const auto& h = state_.hyper;
  state_.A.conservativeResize(K + 1, Eigen::NoChange);
  state_.A.row(K) = a.transpose();
  for (std::size_t ee = 0; ee < state_.events.size(); ++ee) {
    auto& ev = state_.events[ee];
    ev.F.conservativeResize(Eigen::NoChange, K + 1);
    ev.F.col(K).setZero();
    for (std::size_t ii = 0; ii < ev.log_eta.size(); ++ii) {
      if (static_cast<int>(ee) == e && static_cast<int>(ii) == i) {
        ev.log_eta[ii] = log_eta_i;
        continue;
      }
      Eigen::MatrixXd& le = ev.log_eta[ii];
      le.conservativeResize(K + 1, K + 1);
      for (int j = 0; j <= K; ++j) {
        le(K, j) = rng_.log_gamma(h.gamma_c + (j == K ? h.kappa_c : 0.0));
        if (j < K) le(j, K) = rng_.log_gamma(h.gamma_c);
      }
    }
  }
  if (!opts_.ibp_extra_counts.empty()) opts_.ibp_extra_counts.push_back(0);
}

void Sampler::channel_step(int e, int i) {
  auto& ev = state_.events[e];
  const EventData& d = data_.events[e];
  const auto& h = state_.hyper;
  const int r = cfg_.ar_order;
  const int K = state_.K();
  const int g = group_of(e);
  ChannelLikInputs in{&d.y, r, &state_.A, &E_[e], &ev.Z, &covs_[g]};
  std::vector<int> all(K);
  std::iota(all.begin(), all.end(), 0);
  Eigen::MatrixXd ll;
  channel_loglik(in, i, all, ll, opts_.exec);

  const std::vector<int> usage = usage_with_extra();
  std::vector<char> f(K);
  std::vector<int> m_minus(K);
  for (int k = 0; k < K; ++k) {
    f[k] = static_cast<char>(ev.F(i, k));
    m_minus[k] = usage[k] - f[k];
  }
  const int N_tot = total_customers();
  MoveStats ms = sample_shared_features(f, m_minus, N_tot, ll, ev.log_eta[i], rng_);
  stats_.shared_proposed += ms.proposed;
  stats_.shared_accepted += ms.accepted;

  if (opts_.births) {
    std::vector<int> unique;
    for (int k = 0; k < K; ++k)
      if (f[k] && m_minus[k] == 0) unique.push_back(k);
    const int n = static_cast<int>(unique.size());
    const double lambda = h.alpha_c / N_tot;
    const std::vector<int> act = active_list(f);
    const double cur = channel_marginal_loglik(ll, ev.log_eta[i], act);
    if (rng_.uniform() < 0.5) {
      ++stats_.births_proposed;
      Eigen::LLT<Eigen::MatrixXd> s0(priors_[0].Sigma0);
      Eigen::VectorXd a = rng_.mvnormal_chol(priors_[0].m0, s0.matrixL());
      Eigen::MatrixXd ll_ext(ll.rows(), K + 1);
      ll_ext.leftCols(K) = ll;
      channel_loglik_column(in, i, a, ll_ext.col(K));
      Eigen::MatrixXd le(K + 1, K + 1);
      le.topLeftCorner(K, K) = ev.log_eta[i];
      for (int j = 0; j <= K; ++j) {
        le(K, j) = rng_.log_gamma(h.gamma_c + (j == K ? h.kappa_c : 0.0));
        if (j < K) le(j, K) = rng_.log_gamma(h.gamma_c);
      }
      std::vector<int> act_new = act;
      act_new.push_back(K);
      const double prop = channel_marginal_loglik(ll_ext, le, act_new);
      if (std::log(rng_.uniform()) < prop - cur + birth_log_prior_ratio(n, lambda)) {
        ++stats_.births_accepted;
        append_feature(a, e, i, le);
        f.push_back(1);
        ll = std::move(ll_ext);
      }
    } else if (n > 0) {
      ++stats_.deaths_proposed;
      const int k = unique[rng_.uniform_int(n)];
      std::vector<char> gf = f;
      gf[k] = 0;
      const std::vector<int> act_new = active_list(gf);
      if (!act_new.empty()) {
        const double prop = channel_marginal_loglik(ll, ev.log_eta[i], act_new);
        if (std::log(rng_.uniform()) < prop - cur + death_log_prior_ratio(n, lambda)) {
          ++stats_.deaths_accepted;
          f = std::move(gf);
        }
      }
    }
  }

  for (std::size_t k = 0; k < f.size(); ++k) ev.F(i, static_cast<Eigen::Index>(k)) = f[k];
  std::vector<int> act = active_list(f);
  std::vector<int> zi = sample_channel_states(ll, ev.log_eta[i], act, rng_);
  for (int t = 0; t < d.T(); ++t) ev.z(t, i) = zi[t];
  prune_features();
  update_innovation_column(d.y, ev.z, state_.A, r, i, E_[e]);
  std::vector<char> fi(state_.K());
  for (int k = 0; k < state_.K(); ++k) fi[k] = static_cast<char>(ev.F(i, k));
  act = active_list(fi);
  Eigen::MatrixXi counts = transition_counts(ev.z.col(i), state_.K());
  sample_eta(ev.log_eta[i], act, counts, h.gamma_c, h.kappa_c, rng_);
}

void Sampler::prune_features() {
  const std::vector<int> usage = usage_with_extra();
  std::vector<int> keep;
  for (std::size_t k = 0; k < usage.size(); ++k)
    if (usage[k] > 0) keep.push_back(static_cast<int>(k));
  if (keep.size() == usage.size()) return;
  std::vector<int> remap(usage.size(), -1);
  for (std::size_t c = 0; c < keep.size(); ++c) remap[keep[c]] = static_cast<int>(c);
  const int Kn = static_cast<int>(keep.size());
  Eigen::MatrixXd A(Kn, state_.A.cols());
  for (int c = 0; c < Kn; ++c) A.row(c) = state_.A.row(keep[c]);
  state_.A = std::move(A);
  for (auto& ev : state_.events) {
    Eigen::MatrixXi F(ev.F.rows(), Kn);
    for (int c = 0; c < Kn; ++c) F.col(c) = ev.F.col(keep[c]);
    ev.F = std::move(F);
    for (auto& le : ev.log_eta) {
      Eigen::MatrixXd n(Kn, Kn);
      for (int a = 0; a < Kn; ++a)
        for (int b = 0; b < Kn; ++b) n(a, b) = le(keep[a], keep[b]);
      le = std::move(n);
    }
    for (Eigen::Index x = 0; x < ev.z.size(); ++x) ev.z.data()[x] = remap[ev.z.data()[x]];
  }
  if (!opts_.ibp_extra_counts.empty()) {
    std::vector<int> extra(Kn);
    for (int c = 0; c < Kn; ++c) extra[c] = opts_.ibp_extra_counts[keep[c]];
    opts_.ibp_extra_counts = std::move(extra);
  }
}

void Sampler::sweep_events() {
  const int L = cfg_.L, r = cfg_.ar_order;
  auto& h = state_.hyper;
  const std::size_t nev = data_.events.size();
  std::vector<Eigen::MatrixXi> n(nev), m(nev), mbar(nev);
  std::vector<Eigen::VectorXi> w(nev);
  for (std::size_t e = 0; e < nev; ++e) {
    auto& ev = state_.events[e];
    std::vector<int> Z = sample_event_states(E_[e], ev.phi, covs_[group_of(static_cast<int>(e))], r, rng_);
    for (std::size_t t = 0; t < Z.size(); ++t) ev.Z[static_cast<Eigen::Index>(t)] = Z[t];
    n[e] = event_transition_counts(ev.Z, L);
    m[e] = sample_table_counts(n[e], ev.beta, h.alpha_e, h.kappa_e, rng_);
    w[e] = sample_override_counts(m[e], ev.beta, h.rho_e, rng_);
    mbar[e] = corrected_table_counts(m[e], w[e]);
  }
  if (opts_.update_event_hypers) {
    double sum = h.alpha_kappa_e(), rho = h.rho_e;
    if (cfg_.samples("alpha_kappa_e")) {
      std::vector<int> rows;
      long m_total = 0;
      for (std::size_t e = 0; e < nev; ++e) {
        for (int l = 0; l < L; ++l) rows.push_back(n[e].row(l).sum());
        m_total += m[e].sum();
      }
      sum = sample_concentration_plus_sticky(sum, rows, m_total, cfg_.alpha_kappa_e, rng_);
    }
    if (cfg_.samples("rho_e")) {
      long sw = 0, mb = 0;
      for (std::size_t e = 0; e < nev; ++e) {
        sw += w[e].sum();
        mb += mbar[e].sum();
      }
      rho = sample_rho_e(sw, mb, cfg_.rho_e, rng_);
    }
    h.set_event_concentration(sum, rho);
    if (cfg_.samples("gamma_e")) h.gamma_e = sample_gamma_e(h.gamma_e, mbar, cfg_.gamma_e, rng_);
  }
  for (std::size_t e = 0; e < nev; ++e) {
    auto& ev = state_.events[e];
    ev.beta = sample_beta_given_tables(mbar[e], h.gamma_e, rng_);
    ev.phi = sample_phi(n[e], ev.beta, h.alpha_e, h.kappa_e, rng_);
  }
}

void Sampler::sweep_ar() {
  std::vector<ArEventView> views;
  for (std::size_t e = 0; e < data_.events.size(); ++e)
    views.push_back({&data_.events[e].y, &state_.events[e].z, &state_.events[e].Z,
                     &covs_[group_of(static_cast<int>(e))], &E_[e]});
  for (int k = 0; k < state_.K(); ++k)
    sample_ar_coefficient(k, views, state_.A, cfg_.ar_order, priors_[0].m0, priors_[0].Sigma0, rng_);
}

void Sampler::sweep_deltas() {
  for (int g = 0; g < group_count(); ++g) {
    std::vector<const Eigen::MatrixXd*> Es;
    std::vector<const Eigen::VectorXi*> Zs;
    for (std::size_t e = 0; e < data_.events.size(); ++e)
      if (group_of(static_cast<int>(e)) == g) {
        Es.push_back(&E_[e]);
        Zs.push_back(&state_.events[e].Z);
      }
    StateScatter sc = innovation_scatter(Es, Zs, cfg_.L, cfg_.ar_order);
    const int first = cfg_.share_deltas ? 0 : g;
    covs_[g] = sample_deltas(sc, priors_[g].b0, priors_[g].D0, data_.graphs[first], rng_);
    state_.deltas[g].clear();
    for (const auto& c : covs_[g]) state_.deltas[g].push_back(c.delta());
  }
}

void Sampler::sweep_channel_hypers() {
  auto& h = state_.hyper;
  const bool sg = cfg_.samples("gamma_c"), sk = cfg_.samples("kappa_c");
  if (sg || sk) {
    std::vector<PiRow> rows;
    for (auto& ev : state_.events)
      for (int i = 0; i < ev.F.rows(); ++i) {
        std::vector<int> act;
        for (int k = 0; k < ev.F.cols(); ++k)
          if (ev.F(i, k)) act.push_back(k);
        for (std::size_t a = 0; a < act.size(); ++a) {
          PiRow row;
          row.self = static_cast<int>(a);
          row.log_pi.resize(static_cast<Eigen::Index>(act.size()));
          double mx = -INFINITY;
          for (std::size_t b = 0; b < act.size(); ++b) mx = std::max(mx, ev.log_eta[i](act[a], act[b]));
          double s = 0.0;
          for (std::size_t b = 0; b < act.size(); ++b) s += std::exp(ev.log_eta[i](act[a], act[b]) - mx);
          for (std::size_t b = 0; b < act.size(); ++b)
            row.log_pi[static_cast<Eigen::Index>(b)] = ev.log_eta[i](act[a], act[b]) - mx - std::log(s);
          rows.push_back(std::move(row));
        }
      }
    bool acc = false;
    if (sg) {
      h.gamma_c = mh_step_gamma_c(h.gamma_c, h.kappa_c, rows, cfg_.gamma_c, cfg_.sigma2_gamma_c, rng_, &acc);
      stats_.gamma_c_accepted += acc;
    }
    if (sk) {
      h.kappa_c = mh_step_kappa_c(h.kappa_c, h.gamma_c, rows, cfg_.kappa_c, cfg_.sigma2_kappa_c, rng_, &acc);
      stats_.kappa_c_accepted += acc;
    }
    for (auto& ev : state_.events)
      for (int i = 0; i < ev.F.rows(); ++i) {
        std::vector<int> act;
        for (int k = 0; k < ev.F.cols(); ++k)
          if (ev.F(i, k)) act.push_back(k);
        refresh_eta_scale(ev.log_eta[i], act, h.gamma_c, h.kappa_c, rng_);
      }
  }
  if (cfg_.samples("alpha_c")) {
    const double old = h.alpha_c;
    h.alpha_c = sample_alpha_c_constrained(h.alpha_c, state_.K(), total_customers(), cfg_.alpha_c, rng_);
    stats_.alpha_c_accepted += h.alpha_c != old;
  }
}

double Sampler::event_loglik_given_channels(int e) const {
  return event_marginal_loglik(E_[e], state_.events[e].phi, covs_[group_of(e)], cfg_.ar_order);
}

ModelState sample_prior_state(Dataset& data, const ModelConfig& cfg, const std::vector<ResolvedPriors>& priors,
                              Rng& rng) {
  const int L = cfg.L;
  ModelState s;
  Hyperparameters h = initial_hyperparameters(cfg);
  if (cfg.samples("gamma_c")) h.gamma_c = rng.gamma(cfg.gamma_c.a, cfg.gamma_c.b);
  if (cfg.samples("kappa_c")) h.kappa_c = rng.gamma(cfg.kappa_c.a, cfg.kappa_c.b);
  if (cfg.samples("alpha_c")) h.alpha_c = rng.gamma(cfg.alpha_c.a, cfg.alpha_c.b);
  if (cfg.samples("gamma_e")) h.gamma_e = rng.gamma(cfg.gamma_e.a, cfg.gamma_e.b);
  {
    double sum = h.alpha_kappa_e(), rho = h.rho_e;
    if (cfg.samples("alpha_kappa_e")) sum = rng.gamma(cfg.alpha_kappa_e.a, cfg.alpha_kappa_e.b);
    if (cfg.samples("rho_e")) rho = rng.beta(cfg.rho_e.c, cfg.rho_e.d);
    h.set_event_concentration(sum, rho);
  }
  s.hyper = h;

  // IBP over all channels of all events; redraw until no row is empty.
  const int Ntot = data.total_channels();
  std::vector<std::vector<char>> rows;
  std::vector<int> counts;
  while (true) {
    rows.assign(Ntot, {});
    counts.clear();
    bool empty_row = false;
    for (int c = 0; c < Ntot; ++c) {
      std::vector<char> row(counts.size(), 0);
      for (std::size_t k = 0; k < counts.size(); ++k)
        if (rng.bernoulli(static_cast<double>(counts[k]) / (c + 1))) row[k] = 1;
      const long fresh = rng.poisson(h.alpha_c / (c + 1));
      for (long j = 0; j < fresh; ++j) {
        row.push_back(1);
        counts.push_back(0);
      }
      for (std::size_t k = 0; k < row.size(); ++k) counts[k] += row[k];
      if (std::find(row.begin(), row.end(), 1) == row.end()) empty_row = true;
      rows[c] = std::move(row);
    }
    if (!empty_row) break;
  }
  const int K = static_cast<int>(counts.size());
  Eigen::LLT<Eigen::MatrixXd> s0(priors[0].Sigma0);
  s.A.resize(K, cfg.ar_order);
  for (int k = 0; k < K; ++k) s.A.row(k) = rng.mvnormal_chol(priors[0].m0, s0.matrixL()).transpose();

  int c = 0;
  for (auto& d : data.events) {
    EventLatent ev;
    ev.F = Eigen::MatrixXi::Zero(d.N(), K);
    ev.z.resize(d.T(), d.N());
    for (int i = 0; i < d.N(); ++i, ++c) {
      for (std::size_t k = 0; k < rows[c].size(); ++k) ev.F(i, static_cast<Eigen::Index>(k)) = rows[c][k];
      ev.log_eta.push_back(sample_log_eta_prior(K, h.gamma_c, h.kappa_c, rng));
      std::vector<int> act;
      for (int k = 0; k < K; ++k)
        if (ev.F(i, k)) act.push_back(k);
      Eigen::MatrixXd P = restricted_transitions(ev.log_eta[i], act);
      Eigen::VectorXi zl = sample_markov_chain(P, d.T(), rng);
      for (int t = 0; t < d.T(); ++t) ev.z(t, i) = act[zl[t]];
    }
    ev.beta = rng.dirichlet(Eigen::VectorXd::Constant(L, h.gamma_e / L));
    ev.phi = sample_phi(Eigen::MatrixXi::Zero(L, L), ev.beta, h.alpha_e, h.kappa_e, rng);
    ev.Z = sample_markov_chain(ev.phi, d.T(), rng);
    s.events.push_back(std::move(ev));
  }
  const int groups = static_cast<int>(priors.size());
  s.deltas.resize(groups);
  for (int g = 0; g < groups; ++g)
    for (int l = 0; l < L; ++l)
      s.deltas[g].push_back(sample_hiw(data.graphs[g], priors[g].b0, priors[g].D0, rng).delta());
  sample_data_given_state(data, s, cfg, rng);
  return s;
}

void sample_data_given_state(Dataset& data, const ModelState& s, const ModelConfig& cfg, Rng& rng) {
  const int r = cfg.ar_order;
  std::vector<std::vector<Eigen::MatrixXd>> chol(s.deltas.size());
  for (std::size_t g = 0; g < s.deltas.size(); ++g)
    for (const auto& D : s.deltas[g]) chol[g].push_back(D.llt().matrixL());
  for (std::size_t e = 0; e < data.events.size(); ++e) {
    auto& d = data.events[e];
    const auto& ev = s.events[e];
    const std::size_t g = cfg.share_deltas ? 0 : e;
    const int N = d.N();
    for (int t = 0; t < std::min(r, d.T()); ++t)
      for (int i = 0; i < N; ++i) d.y(t, i) = rng.normal();
    Eigen::VectorXd x(N);
    for (int t = r; t < d.T(); ++t) {
      for (int i = 0; i < N; ++i) x[i] = rng.normal();
      Eigen::VectorXd eps = chol[g][ev.Z[t]] * x;
      for (int i = 0; i < N; ++i) {
        double m = 0.0;
        for (int p = 0; p < r; ++p) m += s.A(ev.z(t, i), p) * d.y(t - 1 - p, i);
        d.y(t, i) = m + eps[i];
      }
    }
  }
}

}  // namespace sfhmm
