#include <doctest.h>

#include "sfhmm/errors.hpp"
#include "sfhmm/event.hpp"
#include "support.hpp"

using namespace sfhmm;
using namespace sfhmm::testing;

namespace {

double log_stirling1(int n, int m) {
  // unsigned Stirling numbers of the first kind by recursion
  std::vector<std::vector<double>> s(n + 1, std::vector<double>(n + 1, 0.0));
  s[0][0] = 1.0;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= a; ++b) s[a][b] = s[a - 1][b - 1] + (a - 1) * s[a - 1][b];
  return std::log(s[n][m]);
}

}  // namespace

TEST_CASE("event marginal likelihood matches enumeration") {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    const int L = 1 + rng.uniform_int(3), T = 2 + rng.uniform_int(5), N = 1 + rng.uniform_int(3);
    EventProblem p = random_event_problem(L, T, N, rng);
    const double oracle = log_sum_exp(event_path_logjoint(p));
    CHECK(std::abs(event_marginal_loglik(p.E, p.phi, p.covs, p.r) - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("event states follow the enumerated posterior") {
  Rng rng(22);
  EventProblem p = random_event_problem(2, 5, 2, rng);
  auto lj = event_path_logjoint(p);
  const double z = log_sum_exp(lj);
  std::vector<double> post;
  for (double x : lj) post.push_back(std::exp(x - z));
  const long draws = 100000;
  std::vector<long> counts(post.size(), 0);
  for (long d = 0; d < draws; ++d) ++counts[encode_path(sample_event_states(p.E, p.phi, p.covs, p.r, rng), 2)];
  CHECK(max_cell_z(counts, post, draws) < 4.0);
}

TEST_CASE("table counts follow the Chinese restaurant law") {
  // p(m | n, theta) = |s(n, m)| theta^m Gamma(theta) / Gamma(theta + n).
  Rng rng(23);
  const int n = 7;
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(2, 2);
  counts(0, 1) = n;
  counts(1, 1) = n;
  Eigen::VectorXd beta(2);
  beta << 0.3, 0.7;
  const double alpha = 2.0, kappa = 1.5;
  const double theta_off = alpha * beta[1], theta_self = alpha * beta[1] + kappa;
  const long draws = 100000;
  std::vector<long> off(n + 1, 0), self(n + 1, 0);
  for (long d = 0; d < draws; ++d) {
    Eigen::MatrixXi m = sample_table_counts(counts, beta, alpha, kappa, rng);
    ++off[m(0, 1)];
    ++self[m(1, 1)];
  }
  auto law = [&](double th) {
    std::vector<double> p(n + 1, 0.0);
    for (int m = 1; m <= n; ++m)
      p[m] = std::exp(log_stirling1(n, m) + m * std::log(th) + std::lgamma(th) - std::lgamma(th + n));
    return p;
  };
  CHECK(max_cell_z(off, law(theta_off), draws) < 4.0);
  CHECK(max_cell_z(self, law(theta_self), draws) < 4.0);
}

TEST_CASE("table counts agree with explicit restaurant seating") {
  Rng rng(24);
  const int n = 12;
  const double theta = 0.8;
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(1, 1);
  counts(0, 0) = n;
  Eigen::VectorXd beta = Eigen::VectorXd::Ones(1);
  std::vector<double> a, b;
  for (int d = 0; d < 50000; ++d) {
    a.push_back(sample_table_counts(counts, beta, theta, 0.0, rng)(0, 0));
    std::vector<int> tables;
    for (int j = 0; j < n; ++j) {
      std::vector<double> w(tables.begin(), tables.end());
      w.push_back(theta);
      const int c = rng.categorical(w);
      if (c == static_cast<int>(tables.size())) tables.push_back(1);
      else ++tables[c];
    }
    b.push_back(static_cast<double>(tables.size()));
  }
  auto ma = moments(a), mb = moments(b);
  CHECK(std::abs(ma.mean - mb.mean) < 3 * std::sqrt(ma.se * ma.se + mb.se * mb.se));
}

TEST_CASE("override counts are binomial") {
  Rng rng(25);
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(2, 2);
  m(0, 0) = 40;
  m(1, 1) = 10;
  Eigen::VectorXd beta(2);
  beta << 0.2, 0.8;
  const double rho = 0.6;
  std::vector<double> w0;
  for (int d = 0; d < 20000; ++d) {
    Eigen::VectorXi w = sample_override_counts(m, beta, rho, rng);
    CHECK(w[0] <= 40);
    w0.push_back(w[0]);
  }
  auto mw = moments(w0);
  CHECK(std::abs(mw.mean - 40 * rho / (rho + 0.2 * (1 - rho))) < 4 * mw.se);
  Eigen::VectorXi w(2);
  w << 3, 1;
  Eigen::MatrixXi mbar = corrected_table_counts(m, w);
  CHECK(mbar(0, 0) == 37);
  CHECK(mbar(1, 1) == 9);
}

TEST_CASE("phi and beta posterior means") {
  Rng rng(26);
  Eigen::MatrixXi n(2, 2);
  n << 5, 1, 2, 7;
  Eigen::VectorXd beta(2);
  beta << 0.4, 0.6;
  const double alpha = 1.5, kappa = 3.0;
  std::vector<double> p00, b0;
  Eigen::MatrixXi mbar(2, 2);
  mbar << 2, 1, 0, 3;
  for (int d = 0; d < 20000; ++d) {
    p00.push_back(sample_phi(n, beta, alpha, kappa, rng)(0, 0));
    b0.push_back(sample_beta_given_tables(mbar, 1.0, rng)[0]);
  }
  const double a00 = alpha * 0.4 + kappa + 5, a01 = alpha * 0.6 + 1;
  auto mp = moments(p00), mb = moments(b0);
  CHECK(std::abs(mp.mean - a00 / (a00 + a01)) < 4 * mp.se);
  CHECK(std::abs(mb.mean - (0.5 + 2) / (1.0 + 6)) < 4 * mb.se);
}

TEST_CASE("innovation scatter splits by event state") {
  Eigen::MatrixXd E(4, 2);
  E << 0, 0, 1, 2, 3, 4, 5, 6;
  Eigen::VectorXi Z(4);
  Z << 1, 0, 1, 0;
  auto sc = innovation_scatter({&E}, {&Z}, 2, 1);
  CHECK(sc.count[0] == 2);
  CHECK(sc.count[1] == 1);
  Eigen::MatrixXd s0 = E.row(1).transpose() * E.row(1) + E.row(3).transpose() * E.row(3);
  CHECK(sc.scatter[0].isApprox(s0));
  CHECK(sc.scatter[1].isApprox(E.row(2).transpose() * E.row(2)));
}

TEST_CASE("delta posterior mean") {
  Rng rng(27);
  auto g = std::make_shared<const DependencyGraph>(DependencyGraph::complete(2));
  StateScatter sc;
  sc.count = {50, 0};
  Eigen::MatrixXd S(2, 2);
  S << 60, 10, 10, 40;
  sc.scatter = {S, Eigen::MatrixXd::Zero(2, 2)};
  const Eigen::MatrixXd D0 = Eigen::MatrixXd::Identity(2, 2);
  std::vector<double> d00, prior00;
  for (int d = 0; d < 20000; ++d) {
    auto covs = sample_deltas(sc, 5.0, D0, g, rng);
    d00.push_back(covs[0].delta()(0, 0));
    prior00.push_back(covs[1].delta()(0, 0));
  }
  auto m = moments(d00), mp = moments(prior00);
  CHECK(std::abs(m.mean - 61.0 / (55.0 - 2.0)) < 4 * m.se);
  CHECK(std::abs(mp.mean - 1.0 / 3.0) < 4 * mp.se);
}
