#include <doctest.h>

#include <map>

#include "sfhmm/channel.hpp"
#include "sfhmm/errors.hpp"
#include "support.hpp"

using namespace sfhmm;
using namespace sfhmm::testing;

TEST_CASE("channel marginal likelihood matches enumeration") {
  Rng rng(303);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 1 + rng.uniform_int(4), T = 1 + rng.uniform_int(6);
    Eigen::MatrixXd ll(T, K), log_eta(K, K);
    for (Eigen::Index x = 0; x < ll.size(); ++x) ll.data()[x] = 2.0 * rng.normal();
    for (Eigen::Index x = 0; x < log_eta.size(); ++x) log_eta.data()[x] = rng.normal();
    std::vector<int> act;
    for (int k = 0; k < K; ++k)
      if (rng.bernoulli(0.7)) act.push_back(k);
    if (act.empty()) act.push_back(rng.uniform_int(K));
    const double oracle = channel_enumerate(ll, log_eta, act);
    CHECK(std::abs(channel_marginal_loglik(ll, log_eta, act) - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("channel states use active features only") {
  Rng rng(4);
  Eigen::MatrixXd ll = Eigen::MatrixXd::Zero(20, 4), log_eta = Eigen::MatrixXd::Zero(4, 4);
  ll.col(1).setConstant(50.0);  // inactive feature with huge likelihood
  auto z = sample_channel_states(ll, log_eta, {0, 2}, rng);
  for (int s : z) CHECK((s == 0 || s == 2));
  CHECK_THROWS_AS(channel_marginal_loglik(ll, log_eta, {}), PreconditionError);
}

TEST_CASE("transition counts") {
  Eigen::VectorXi z(5);
  z << 0, 0, 2, 2, 1;
  Eigen::MatrixXi n = transition_counts(z, 3);
  CHECK(n(0, 0) == 1);
  CHECK(n(0, 2) == 1);
  CHECK(n(2, 2) == 1);
  CHECK(n(2, 1) == 1);
  CHECK(n.sum() == 4);
}

TEST_CASE("eta posterior concentrates on empirical transition frequencies") {
  Rng rng(5);
  Eigen::MatrixXd log_eta = sample_log_eta_prior(3, 1.0, 5.0, rng);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(3, 3);
  counts(0, 0) = 6000;
  counts(0, 2) = 2000;
  counts(2, 0) = 1000;
  counts(2, 2) = 3000;
  sample_eta(log_eta, {0, 2}, counts, 1.0, 5.0, rng);
  Eigen::MatrixXd P = restricted_transitions(log_eta, {0, 2});
  CHECK(P(0, 0) == doctest::Approx(0.75).epsilon(0.03));
  CHECK(P(1, 1) == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("eta prior normalized rows are sticky Dirichlet") {
  // Normalized rows of independent Gamma(gamma + kappa [j == k]) draws are
  // Dirichlet; the mean self-transition is (gamma + kappa) / (K gamma + kappa).
  Rng rng(6);
  std::vector<double> self;
  for (int rep = 0; rep < 20000; ++rep) {
    Eigen::MatrixXd le = sample_log_eta_prior(3, 0.5, 4.0, rng);
    self.push_back(restricted_transitions(le, {0, 1, 2})(1, 1));
  }
  auto m = moments(self);
  CHECK(std::abs(m.mean - 4.5 / 5.5) < 4 * m.se);
}

TEST_CASE("shared-feature flips leave the feature prior invariant") {
  // With a flat likelihood the flips target prod_k p_k^f (1 - p_k)^(1 - f)
  // with p_k = m_k / N, restricted to non-empty f.
  Rng rng(7);
  const std::vector<int> m{1, 2, 3};
  const int N = 4;
  Eigen::MatrixXd ll = Eigen::MatrixXd::Zero(5, 3), log_eta = Eigen::MatrixXd::Zero(3, 3);
  std::vector<double> w(8, 0.0);
  for (int code = 1; code < 8; ++code) {
    double p = 1.0;
    for (int k = 0; k < 3; ++k) p *= (code >> k & 1) ? m[k] / double(N) : 1.0 - m[k] / double(N);
    w[code] = p;
  }
  double tot = 0.0;
  for (double x : w) tot += x;
  for (double& x : w) x /= tot;
  std::vector<char> f{1, 0, 0};
  std::vector<long> counts(8, 0);
  const long sweeps = 200000;
  for (long s = 0; s < sweeps; ++s) {
    sample_shared_features(f, m, N, ll, log_eta, rng);
    ++counts[f[0] | f[1] << 1 | f[2] << 2];
  }
  CHECK(counts[0] == 0);
  for (int code = 1; code < 8; ++code)
    CHECK(std::abs(counts[code] / double(sweeps) - w[code]) < 0.01);
}

TEST_CASE("birth-death ratios give a Poisson stationary count") {
  // Toy chain on the number n of unique features with a flat likelihood and
  // 1/2 birth, 1/2 death proposals; its stationary law must be Poisson(lambda).
  Rng rng(8);
  const double lambda = 2.5;
  int n = 0;
  const long steps = 400000;
  std::vector<long> counts(30, 0);
  for (long s = 0; s < steps; ++s) {
    if (rng.bernoulli(0.5)) {
      if (std::log(rng.uniform()) < birth_log_prior_ratio(n, lambda)) ++n;
    } else if (n > 0) {
      if (std::log(rng.uniform()) < death_log_prior_ratio(n, lambda)) --n;
    }
    ++counts[std::min(n, 29)];
  }
  for (int k = 0; k < 8; ++k) {
    const double pk = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
    CHECK(std::abs(counts[k] / double(steps) - pk) < 0.01);
  }
}

TEST_CASE("poisson count ratio") {
  const double lambda = 3.2;
  for (int n = 0; n < 6; ++n) {
    const double pn = n * std::log(lambda) - std::lgamma(n + 1.0);
    const double pn1 = (n + 1) * std::log(lambda) - std::lgamma(n + 2.0);
    CHECK(std::log(poisson_count_ratio(n, lambda)) == doctest::Approx(pn1 - pn).epsilon(1e-12));
  }
}
