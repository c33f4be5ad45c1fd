#include "sfhmm/channel.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "sfhmm/errors.hpp"

namespace sfhmm {

std::vector<int> active_list(const std::vector<char>& f) {
  std::vector<int> a;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f[k]) a.push_back(static_cast<int>(k));
  return a;
}

Eigen::MatrixXd restricted_transitions(const Eigen::MatrixXd& log_eta, const std::vector<int>& active) {
  const int K = static_cast<int>(active.size());
  Eigen::MatrixXd P(K, K);
  for (int a = 0; a < K; ++a) {
    double m = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < K; ++b) m = std::max(m, log_eta(active[a], active[b]));
    double s = 0.0;
    for (int b = 0; b < K; ++b) s += (P(a, b) = std::exp(log_eta(active[a], active[b]) - m));
    P.row(a) /= s;
  }
  return P;
}

HmmProblem channel_problem(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                           const std::vector<int>& active) {
  if (active.empty()) throw PreconditionError("channel has no active features");
  const int K = static_cast<int>(active.size());
  HmmProblem p;
  p.pi0 = Eigen::VectorXd::Constant(K, 1.0 / K);
  p.Pi = restricted_transitions(log_eta, active);
  p.log_lik.resize(loglik_all.rows(), K);
  for (int c = 0; c < K; ++c) p.log_lik.col(c) = loglik_all.col(active[c]);
  return p;
}

double channel_marginal_loglik(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                               const std::vector<int>& active) {
  return forward_marginal(channel_problem(loglik_all, log_eta, active));
}

std::vector<int> sample_channel_states(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                                       const std::vector<int>& active, Rng& rng) {
  std::vector<int> local = sample_states(channel_problem(loglik_all, log_eta, active), rng);
  for (int& s : local) s = active[s];
  return local;
}

Eigen::MatrixXi transition_counts(const Eigen::Ref<const Eigen::VectorXi>& z, int K) {
  Eigen::MatrixXi n = Eigen::MatrixXi::Zero(K, K);
  for (Eigen::Index t = 1; t < z.size(); ++t) ++n(z[t - 1], z[t]);
  return n;
}

Eigen::MatrixXd sample_log_eta_prior(int K, double gamma_c, double kappa_c, Rng& rng) {
  Eigen::MatrixXd le(K, K);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) le(j, k) = rng.log_gamma(gamma_c + (j == k ? kappa_c : 0.0));
  return le;
}

void refresh_eta_scale(Eigen::MatrixXd& log_eta, const std::vector<int>& active, double gamma_c,
                       double kappa_c, Rng& rng) {
  const int K = static_cast<int>(log_eta.rows());
  std::vector<char> on(K, 0);
  for (int k : active) on[k] = 1;
  const double Ki = static_cast<double>(active.size());
  for (int j = 0; j < K; ++j) {
    if (on[j]) {
      // Keep the normalized active row, draw a fresh total.
      double m = -std::numeric_limits<double>::infinity();
      for (int k : active) m = std::max(m, log_eta(j, k));
      double s = 0.0;
      for (int k : active) s += std::exp(log_eta(j, k) - m);
      const double log_norm = m + std::log(s);
      const double log_c = rng.log_gamma(Ki * gamma_c + kappa_c);
      for (int k : active) log_eta(j, k) += log_c - log_norm;
    }
    for (int k = 0; k < K; ++k)
      if (!(on[j] && on[k])) log_eta(j, k) = rng.log_gamma(gamma_c + (j == k ? kappa_c : 0.0));
  }
}

void sample_eta(Eigen::MatrixXd& log_eta, const std::vector<int>& active, const Eigen::MatrixXi& counts,
                double gamma_c, double kappa_c, Rng& rng) {
  const int K = static_cast<int>(log_eta.rows());
  std::vector<char> on(K, 0);
  for (int k : active) on[k] = 1;
  const int Ki = static_cast<int>(active.size());
  Eigen::VectorXd alpha(Ki);
  for (int j = 0; j < K; ++j) {
    if (on[j]) {
      for (int c = 0; c < Ki; ++c) {
        const int k = active[c];
        alpha[c] = gamma_c + (j == k ? kappa_c : 0.0) + counts(j, k);
      }
      Eigen::VectorXd ldir = rng.log_dirichlet(alpha);
      const double log_c = rng.log_gamma(Ki * gamma_c + kappa_c);
      for (int c = 0; c < Ki; ++c) log_eta(j, active[c]) = ldir[c] + log_c;
    }
    for (int k = 0; k < K; ++k)
      if (!(on[j] && on[k])) log_eta(j, k) = rng.log_gamma(gamma_c + (j == k ? kappa_c : 0.0));
  }
}

MoveStats sample_shared_features(std::vector<char>& f, const std::vector<int>& m_minus, int N_total,
                                 const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta, Rng& rng) {
  MoveStats stats;
  std::vector<int> shared;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (m_minus[k] > 0) shared.push_back(static_cast<int>(k));
  if (shared.empty()) return stats;
  shuffle(shared, rng);
  std::vector<int> act = active_list(f);
  double cur = act.empty() ? -std::numeric_limits<double>::infinity()
                           : channel_marginal_loglik(loglik_all, log_eta, act);
  for (int k : shared) {
    ++stats.proposed;
    std::vector<char> g = f;
    g[k] = !g[k];
    std::vector<int> gact = active_list(g);
    if (gact.empty()) continue;
    const double p_on = static_cast<double>(m_minus[k]) / N_total;
    if (g[k] && p_on <= 0.0) continue;
    const double log_prior = g[k] ? std::log(p_on) - std::log1p(-p_on) : std::log1p(-p_on) - std::log(p_on);
    const double prop = channel_marginal_loglik(loglik_all, log_eta, gact);
    const double log_ratio = prop - cur + log_prior;
    if (std::log(rng.uniform()) < log_ratio) {
      f = std::move(g);
      cur = prop;
      ++stats.accepted;
    }
  }
  return stats;
}

double poisson_count_ratio(int n, double lambda) { return lambda / (n + 1.0); }

double birth_log_prior_ratio(int n, double lambda) { return std::log(lambda) - std::log(n + 1.0); }

double death_log_prior_ratio(int n, double lambda) { return std::log(static_cast<double>(n)) - std::log(lambda); }

}  // namespace sfhmm
