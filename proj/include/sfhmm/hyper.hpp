#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfhmm/config.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

struct Hyperparameters {
  double gamma_c = 1.0;
  double kappa_c = 1000.0;
  double alpha_c = 1.0;
  double alpha_e = 0.5;
  double kappa_e = 0.5;
  double gamma_e = 1.0;
  double rho_e = 0.5;

  double alpha_kappa_e() const { return alpha_e + kappa_e; }
  // Sets alpha_e = (1 - rho) s and kappa_e = rho s.
  void set_event_concentration(double sum, double rho);
};

// One feature-restricted transition row: normalized log-probabilities over
// the channel's active features and the position of the self transition.
struct PiRow {
  Eigen::VectorXd log_pi;
  int self = 0;
};

// sum over rows of log Dir(pi; gamma + kappa e_self).
double pi_loglik(const std::vector<PiRow>& rows, double gamma_c, double kappa_c);

// log density of the Gamma(x^2/s2, x/s2) proposal (mean x, variance s2) at y.
double gamma_proposal_logpdf(double y, double x, double s2);
double gamma_logpdf(double x, const GammaPrior& p);

// Full MH log-ratio for moving gamma_c (or kappa_c) from cur to prop.
double mh_log_ratio_gamma_c(double cur, double prop, double kappa_c, const std::vector<PiRow>& rows,
                            const GammaPrior& prior, double s2);
double mh_log_ratio_kappa_c(double cur, double prop, double gamma_c, const std::vector<PiRow>& rows,
                            const GammaPrior& prior, double s2);

double mh_step_gamma_c(double cur, double kappa_c, const std::vector<PiRow>& rows, const GammaPrior& prior,
                       double s2, Rng& rng, bool* accepted = nullptr);
double mh_step_kappa_c(double cur, double gamma_c, const std::vector<PiRow>& rows, const GammaPrior& prior,
                       double s2, Rng& rng, bool* accepted = nullptr);

// Gamma(a + K_+, b + H_N) draw.
double sample_alpha_c(int K_plus, int N, const GammaPrior& prior, Rng& rng);

// log P(no empty row | alpha) for an N-customer IBP, by inclusion-exclusion
// in extended precision.
double log_prob_rows_nonempty(double alpha, int N);

// alpha_c update under the constraint that every row holds a feature: the
// unconstrained Gamma posterior is used as an independence proposal and
// corrected by the probability of the constraint.
double sample_alpha_c_constrained(double cur, int K_plus, int N, const GammaPrior& prior, Rng& rng);

// (alpha_e + kappa_e) from row totals n_{l.} (all rows of all events) and
// the total number of tables.
double sample_concentration_plus_sticky(double cur, const std::vector<int>& row_totals, long m_total,
                                        const GammaPrior& prior, Rng& rng);

double sample_rho_e(long sum_w, long mbar_total, const BetaPrior& prior, Rng& rng);

// gamma_e from the corrected table counts of each event.
double sample_gamma_e(double cur, const std::vector<Eigen::MatrixXi>& mbar, const GammaPrior& prior, Rng& rng);

}  // namespace sfhmm
