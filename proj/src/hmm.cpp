#include "sfhmm/hmm.hpp"

#include <cmath>
#include <limits>

#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp(log_lik row - max) into out, returns the max (or -inf).
double exp_row(const Eigen::MatrixXd& log_lik, int t, Eigen::VectorXd& out) {
  const int K = static_cast<int>(log_lik.cols());
  double m = kNegInf;
  for (int k = 0; k < K; ++k) m = std::max(m, log_lik(t, k));
  if (m == kNegInf || std::isnan(m)) {
    out.setZero();
    return kNegInf;
  }
  for (int k = 0; k < K; ++k) out[k] = std::exp(log_lik(t, k) - m);
  return m;
}

}  // namespace

void validate(const HmmProblem& p) {
  const int K = p.K();
  if (K < 1 || p.T() < 1) throw PreconditionError("HMM needs K >= 1 and T >= 1");
  if (p.Pi.rows() != K || p.Pi.cols() != K || p.log_lik.cols() != K)
    throw PreconditionError("HMM dimension mismatch");
  if (std::abs(p.pi0.sum() - 1.0) > 1e-12 || (p.pi0.array() < 0.0).any())
    throw PreconditionError("initial distribution is not a simplex point");
  for (int j = 0; j < K; ++j)
    if (std::abs(p.Pi.row(j).sum() - 1.0) > 1e-12 || (p.Pi.row(j).array() < 0.0).any())
      throw PreconditionError("transition row " + std::to_string(j) + " is not stochastic");
  for (Eigen::Index k = 0; k < p.log_lik.size(); ++k) {
    double v = p.log_lik.data()[k];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw PreconditionError("log-likelihood entries must be finite or -inf");
  }
}

double forward_marginal(const HmmProblem& p) {
  const int K = p.K(), T = p.T();
  Eigen::VectorXd u(K), pred(K), alpha(K);
  double total = 0.0;
  pred = p.pi0;
  for (int t = 0; t < T; ++t) {
    if (t > 0) pred.noalias() = p.Pi.transpose() * alpha;
    const double m = exp_row(p.log_lik, t, u);
    if (m == kNegInf) return kNegInf;
    alpha = pred.cwiseProduct(u);
    const double s = alpha.sum();
    if (!(s > 0.0)) return kNegInf;
    total += m + std::log(s);
    alpha /= s;
  }
  return total;
}

std::vector<int> sample_states(const HmmProblem& p, Rng& rng) {
  const int K = p.K(), T = p.T();
  // beta[t] proportional to p(y_{t+1:T} | z_t), normalized each step.
  Eigen::MatrixXd beta(T, K);
  Eigen::VectorXd u(K), tmp(K);
  beta.row(T - 1).setOnes();
  for (int t = T - 1; t > 0; --t) {
    if (exp_row(p.log_lik, t, u) == kNegInf)
      throw SamplingError("no state has positive likelihood at t=" + std::to_string(t), t);
    tmp = u.cwiseProduct(beta.row(t).transpose());
    Eigen::VectorXd b = p.Pi * tmp;
    const double s = b.sum();
    if (!(s > 0.0)) throw SamplingError("zero posterior mass at t=" + std::to_string(t), t);
    beta.row(t - 1) = (b / s).transpose();
  }
  std::vector<int> z(T);
  Eigen::VectorXd w(K);
  for (int t = 0; t < T; ++t) {
    if (exp_row(p.log_lik, t, u) == kNegInf)
      throw SamplingError("no state has positive likelihood at t=" + std::to_string(t), t);
    if (t == 0)
      w = p.pi0.cwiseProduct(u).cwiseProduct(beta.row(0).transpose());
    else
      w = p.Pi.row(z[t - 1]).transpose().cwiseProduct(u).cwiseProduct(beta.row(t).transpose());
    if (!(w.sum() > 0.0)) throw SamplingError("zero posterior mass at t=" + std::to_string(t), t);
    z[t] = rng.categorical(std::span<const double>(w.data(), static_cast<std::size_t>(K)));
  }
  return z;
}

}  // namespace sfhmm
