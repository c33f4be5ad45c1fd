#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sfhmm {

// Explicit random stream passed to every sampler. Wraps a 64-bit Mersenne
// twister; all draws go through std distributions so a (seed, platform) pair
// fully determines the output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  // Independent stream derived from (seed, stream) via seed_seq mixing.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma with shape/rate parameterization (mean shape/rate).
  double gamma(double shape, double rate = 1.0);
  // log of a Gamma(shape, 1) draw; stays finite for shapes far below 1
  // where the draw itself underflows.
  double log_gamma(double shape);
  double beta(double a, double b);
  bool bernoulli(double p);
  long binomial(long n, double p);
  long poisson(double mean);
  int uniform_int(int n);  // in [0, n)

  // Dirichlet draw; components with parameter 0 come out exactly 0.
  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha);
  // Normalized log-probabilities of a Dirichlet draw (-inf for zero params).
  Eigen::VectorXd log_dirichlet(const Eigen::VectorXd& alpha);

  // Index drawn proportionally to nonnegative weights. Throws when all
  // weights are zero.
  int categorical(std::span<const double> weights);

  // x ~ N(mean, cov) with cov given by its lower Cholesky factor.
  Eigen::VectorXd mvnormal_chol(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

template <typename Container>
void shuffle(Container& c, Rng& rng) {
  for (int i = static_cast<int>(c.size()) - 1; i > 0; --i) {
    int j = rng.uniform_int(i + 1);
    std::swap(c[i], c[j]);
  }
}

}  // namespace sfhmm
