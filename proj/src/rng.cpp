#include "sfhmm/rng.hpp"

#include <cmath>
#include <limits>

#include "sfhmm/errors.hpp"

namespace sfhmm {

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x5f3759dfu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return Rng((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
}

double Rng::uniform() {
  // (0,1): log(uniform()) must stay finite.
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double u;
  do {
    u = d(engine_);
  } while (u <= 0.0);
  return u;
}

double Rng::normal() {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(engine_);
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw PreconditionError("gamma draw needs positive shape and rate");
  if (shape < 1.0) return std::exp(log_gamma(shape)) / rate;
  std::gamma_distribution<double> d(shape, 1.0);
  return d(engine_) / rate;
}

double Rng::log_gamma(double shape) {
  if (!(shape > 0.0)) throw PreconditionError("log-gamma draw needs positive shape");
  if (shape >= 1.0) {
    std::gamma_distribution<double> d(shape, 1.0);
    return std::log(d(engine_));
  }
  // G(a) = G(a+1) * U^(1/a)
  std::gamma_distribution<double> d(shape + 1.0, 1.0);
  return std::log(d(engine_)) + std::log(uniform()) / shape;
}

double Rng::beta(double a, double b) {
  double la = log_gamma(a);
  double lb = log_gamma(b);
  double m = std::max(la, lb);
  double ea = std::exp(la - m), eb = std::exp(lb - m);
  return ea / (ea + eb);
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

long Rng::binomial(long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long> d(n, p);
  return d(engine_);
}

long Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long> d(mean);
  return d(engine_);
}

int Rng::uniform_int(int n) {
  std::uniform_int_distribution<int> d(0, n - 1);
  return d(engine_);
}

Eigen::VectorXd Rng::log_dirichlet(const Eigen::VectorXd& alpha) {
  const Eigen::Index k = alpha.size();
  Eigen::VectorXd lg(k);
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k; ++j) {
    lg[j] = alpha[j] > 0.0 ? log_gamma(alpha[j]) : -std::numeric_limits<double>::infinity();
    m = std::max(m, lg[j]);
  }
  if (!std::isfinite(m)) throw PreconditionError("Dirichlet needs a positive parameter");
  double s = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) s += std::exp(lg[j] - m);
  const double log_norm = m + std::log(s);
  for (Eigen::Index j = 0; j < k; ++j) lg[j] -= log_norm;
  return lg;
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& alpha) {
  // Scalar exp keeps exact zeros (vectorized exp flushes -inf to a denormal).
  Eigen::VectorXd d = log_dirichlet(alpha);
  for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = std::exp(d[j]);
  return d;
}

int Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw PreconditionError("categorical draw with zero total weight");
  double u = uniform() * total;
  int last_positive = -1;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    if (u < weights[k]) return last_positive;
    u -= weights[k];
  }
  return last_positive;
}

Eigen::VectorXd Rng::mvnormal_chol(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower) {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normal();
  return mean + chol_lower.triangularView<Eigen::Lower>() * z;
}

}  // namespace sfhmm
