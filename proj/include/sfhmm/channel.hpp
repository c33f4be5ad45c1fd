#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfhmm/hmm.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// Features are global library indices; `active` lists those with f = 1.
// loglik_all is T x K over the whole library (columns of inactive features
// are never read).

// Row-normalized exp(log_eta) restricted to active rows and columns.
Eigen::MatrixXd restricted_transitions(const Eigen::MatrixXd& log_eta, const std::vector<int>& active);

HmmProblem channel_problem(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                           const std::vector<int>& active);

// log p(y^i | f, eta, rest) with z^i summed out. Throws PreconditionError
// for an empty feature set.
double channel_marginal_loglik(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                               const std::vector<int>& active);

// Block draw of z^i; returns global feature indices.
std::vector<int> sample_channel_states(const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta,
                                       const std::vector<int>& active, Rng& rng);

// K x K transition counts of a state path (initial state not counted).
Eigen::MatrixXi transition_counts(const Eigen::Ref<const Eigen::VectorXi>& z, int K);

// log eta_{jk} ~ log Gamma(gamma + kappa [j == k], 1) for every entry.
Eigen::MatrixXd sample_log_eta_prior(int K, double gamma_c, double kappa_c, Rng& rng);

// Posterior of eta^i given z^i: active rows get Dirichlet directions with
// counts and a Gamma(K_i gamma + kappa, 1) scale; all other entries are
// refreshed from the prior.
void sample_eta(Eigen::MatrixXd& log_eta, const std::vector<int>& active, const Eigen::MatrixXi& counts,
                double gamma_c, double kappa_c, Rng& rng);

// Redraws everything that the normalized active rows do not determine: the
// per-row scales and all entries outside active x active.
void refresh_eta_scale(Eigen::MatrixXd& log_eta, const std::vector<int>& active, double gamma_c,
                       double kappa_c, Rng& rng);

// Shared-feature Metropolis flips for one channel. f is the K-vector of
// indicators, m_minus[k] counts other channels holding k, N_total is the
// number of IBP customers. Only k with m_minus[k] > 0 are visited, in random
// order. A move that would leave f empty is rejected.
struct MoveStats {
  int proposed = 0;
  int accepted = 0;
};
MoveStats sample_shared_features(std::vector<char>& f, const std::vector<int>& m_minus, int N_total,
                                 const Eigen::MatrixXd& loglik_all, const Eigen::MatrixXd& log_eta, Rng& rng);

// Acceptance log-ratio terms of the unique-feature birth/death move with
// n current unique features and lambda = alpha_c / N_total. A birth from n
// to n+1 carries lambda/(n+1) and the matching death the reciprocal, which
// combine the Poisson prior on the count with the uniform death selection.
double birth_log_prior_ratio(int n, double lambda);
double death_log_prior_ratio(int n, double lambda);
// Poisson(n+1 | lambda) / Poisson(n | lambda).
double poisson_count_ratio(int n, double lambda);

std::vector<int> active_list(const std::vector<char>& f);

}  // namespace sfhmm
