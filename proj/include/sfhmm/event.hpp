#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sfhmm/ggm.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// Block draw of Z with a uniform initial distribution over the L states.
std::vector<int> sample_event_states(const Eigen::MatrixXd& innovations, const Eigen::MatrixXd& phi,
                                     const std::vector<SparseCovariance>& deltas, int r, Rng& rng);

// log p(y | z, phi, A, Delta) with Z summed out by forward filtering.
double event_marginal_loglik(const Eigen::MatrixXd& innovations, const Eigen::MatrixXd& phi,
                             const std::vector<SparseCovariance>& deltas, int r);

Eigen::MatrixXi event_transition_counts(const Eigen::Ref<const Eigen::VectorXi>& Z, int L);

// Rows phi_l ~ Dir(alpha beta + kappa e_l + n_l).
Eigen::MatrixXd sample_phi(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double alpha_e, double kappa_e,
                           Rng& rng);

// Table counts m_{ll'}: sum over n_{ll'} customers of Bernoulli draws with
// success theta / (theta + j - 1), theta = alpha beta_{l'} + kappa [l == l'].
Eigen::MatrixXi sample_table_counts(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double alpha_e,
                                    double kappa_e, Rng& rng);

// Override counts w_l ~ Bin(m_ll, rho / (rho + beta_l (1 - rho))).
Eigen::VectorXi sample_override_counts(const Eigen::MatrixXi& m, const Eigen::VectorXd& beta, double rho_e,
                                       Rng& rng);

Eigen::MatrixXi corrected_table_counts(const Eigen::MatrixXi& m, const Eigen::VectorXi& w);

// beta ~ Dir(gamma/L + mbar_{.l}).
Eigen::VectorXd sample_beta_given_tables(const Eigen::MatrixXi& mbar, double gamma_e, Rng& rng);

struct BetaAuxiliaries {
  Eigen::MatrixXi m;
  Eigen::VectorXi w;
  Eigen::MatrixXi mbar;
};

// Full auxiliary-variable update: tables, overrides, then beta.
Eigen::VectorXd sample_beta(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double gamma_e, double alpha_e,
                            double kappa_e, double rho_e, Rng& rng, BetaAuxiliaries* aux = nullptr);

// Innovations (rows t >= r) of every event in a covariance group, split by
// event state. Each Delta_l ~ HIW(b0 + n_l, D0 + sum eps eps').
struct StateScatter {
  std::vector<long> count;
  std::vector<Eigen::MatrixXd> scatter;
};
StateScatter innovation_scatter(const std::vector<const Eigen::MatrixXd*>& innovations,
                                const std::vector<const Eigen::VectorXi*>& Z, int L, int r);
std::vector<SparseCovariance> sample_deltas(const StateScatter& s, double b0, const Eigen::MatrixXd& D0,
                                            const std::shared_ptr<const DependencyGraph>& graph, Rng& rng);

}  // namespace sfhmm
