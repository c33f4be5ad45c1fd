#include "sfhmm/hyper.hpp"

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sfhmm/errors.hpp"

namespace sfhmm {

void Hyperparameters::set_event_concentration(double sum, double rho) {
  rho_e = rho;
  alpha_e = (1.0 - rho) * sum;
  kappa_e = rho * sum;
}

double pi_loglik(const std::vector<PiRow>& rows, double g, double k) {
  double out = 0.0;
  for (const auto& row : rows) {
    const int K = static_cast<int>(row.log_pi.size());
    out += std::lgamma(K * g + k) - (K - 1) * std::lgamma(g) - std::lgamma(g + k);
    for (int c = 0; c < K; ++c) out += (g + (c == row.self ? k : 0.0) - 1.0) * row.log_pi[c];
  }
  return out;
}

double gamma_logpdf(double x, const GammaPrior& p) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return p.a * std::log(p.b) - std::lgamma(p.a) + (p.a - 1.0) * std::log(x) - p.b * x;
}

double gamma_proposal_logpdf(double y, double x, double s2) {
  return gamma_logpdf(y, GammaPrior{x * x / s2, x / s2});
}

double mh_log_ratio_gamma_c(double cur, double prop, double kappa_c, const std::vector<PiRow>& rows,
                            const GammaPrior& prior, double s2) {
  return gamma_logpdf(prop, prior) + pi_loglik(rows, prop, kappa_c) + gamma_proposal_logpdf(cur, prop, s2) -
         gamma_logpdf(cur, prior) - pi_loglik(rows, cur, kappa_c) - gamma_proposal_logpdf(prop, cur, s2);
}

double mh_log_ratio_kappa_c(double cur, double prop, double gamma_c, const std::vector<PiRow>& rows,
                            const GammaPrior& prior, double s2) {
  return gamma_logpdf(prop, prior) + pi_loglik(rows, gamma_c, prop) + gamma_proposal_logpdf(cur, prop, s2) -
         gamma_logpdf(cur, prior) - pi_loglik(rows, gamma_c, cur) - gamma_proposal_logpdf(prop, cur, s2);
}

namespace {

double propose(double cur, double s2, Rng& rng) { return rng.gamma(cur * cur / s2, cur / s2); }

}  // namespace

double mh_step_gamma_c(double cur, double kappa_c, const std::vector<PiRow>& rows, const GammaPrior& prior,
                       double s2, Rng& rng, bool* accepted) {
  const double prop = propose(cur, s2, rng);
  const bool ok = prop > 0.0 && std::log(rng.uniform()) < mh_log_ratio_gamma_c(cur, prop, kappa_c, rows, prior, s2);
  if (accepted) *accepted = ok;
  return ok ? prop : cur;
}

double mh_step_kappa_c(double cur, double gamma_c, const std::vector<PiRow>& rows, const GammaPrior& prior,
                       double s2, Rng& rng, bool* accepted) {
  const double prop = propose(cur, s2, rng);
  const bool ok = prop > 0.0 && std::log(rng.uniform()) < mh_log_ratio_kappa_c(cur, prop, gamma_c, rows, prior, s2);
  if (accepted) *accepted = ok;
  return ok ? prop : cur;
}

double sample_alpha_c(int K_plus, int N, const GammaPrior& prior, Rng& rng) {
  double H = 0.0;
  for (int i = 1; i <= N; ++i) H += 1.0 / i;
  return rng.gamma(prior.a + K_plus, prior.b + H);
}

double log_prob_rows_nonempty(double alpha, int N) {
  // Double precision first; the extended sum is only needed under heavy
  // cancellation.
  {
    double sum = 0.0, mass = 0.0, binom = 1.0, H = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double term = binom * std::exp(-alpha * H);
      sum += (j % 2 == 0) ? term : -term;
      mass += term;
      binom = binom * (N - j) / (j + 1);
      H += 1.0 / (j + 1);
    }
    if (sum > 1e-6 * mass) return std::log(sum);
  }
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<240>>;
  Big sum = 0, binom = 1, H = 0;
  const Big a = alpha;
  for (int j = 0; j <= N; ++j) {
    Big term = binom * exp(-a * H);
    sum += (j % 2 == 0) ? term : Big(-term);
    binom = binom * (N - j) / (j + 1);
    H += Big(1) / (j + 1);
  }
  if (!(sum > 0)) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(log(sum));
}

double sample_alpha_c_constrained(double cur, int K_plus, int N, const GammaPrior& prior, Rng& rng) {
  const double prop = sample_alpha_c(K_plus, N, prior, rng);
  const double log_ratio = log_prob_rows_nonempty(cur, N) - log_prob_rows_nonempty(prop, N);
  return std::log(rng.uniform()) < log_ratio ? prop : cur;
}

double sample_concentration_plus_sticky(double cur, const std::vector<int>& row_totals, long m_total,
                                        const GammaPrior& prior, Rng& rng) {
  double shape = prior.a + static_cast<double>(m_total);
  double rate = prior.b;
  for (int n : row_totals) {
    if (n <= 0) continue;
    rate -= std::log(rng.beta(cur + 1.0, n));
    if (rng.bernoulli(n / (n + cur))) shape -= 1.0;
  }
  return rng.gamma(shape, rate);
}

double sample_rho_e(long sum_w, long mbar_total, const BetaPrior& prior, Rng& rng) {
  return rng.beta(prior.c + static_cast<double>(sum_w), prior.d + static_cast<double>(mbar_total));
}

double sample_gamma_e(double cur, const std::vector<Eigen::MatrixXi>& mbar, const GammaPrior& prior, Rng& rng) {
  double shape = prior.a, rate = prior.b;
  for (const auto& m : mbar) {
    const int L = static_cast<int>(m.rows());
    const double conc = cur / L;
    const Eigen::VectorXi cols = m.colwise().sum().transpose();
    long tables = 0;
    for (int l = 0; l < L; ++l)
      for (int j = 1; j <= cols[l]; ++j)
        if (rng.bernoulli(conc / (conc + j - 1.0))) ++tables;
    const long M = cols.sum();
    shape += static_cast<double>(tables);
    if (M > 0) {
      rate -= std::log(rng.beta(cur + 1.0, static_cast<double>(M)));
      if (rng.bernoulli(M / (M + cur))) shape -= 1.0;
    }
  }
  return rng.gamma(shape, rate);
}

}  // namespace sfhmm
