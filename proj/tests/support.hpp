#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sfhmm/ggm.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/hmm.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm::testing {

inline double log_sum_exp(const std::vector<double>& v) {
  double mx = -INFINITY;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Path p in [0, K^T) read as T base-K digits, t = 0 first.
inline std::vector<int> decode_path(long p, int K, int T) {
  std::vector<int> z(T);
  for (int t = 0; t < T; ++t) {
    z[t] = static_cast<int>(p % K);
    p /= K;
  }
  return z;
}

inline long encode_path(const std::vector<int>& z, int K) {
  long p = 0, mult = 1;
  for (int s : z) {
    p += s * mult;
    mult *= K;
  }
  return p;
}

inline long int_pow(int K, int T) {
  long n = 1;
  for (int t = 0; t < T; ++t) n *= K;
  return n;
}

// log p(z, y) of one path by direct product.
inline double hmm_path_logjoint(const HmmProblem& p, const std::vector<int>& z) {
  double lp = std::log(p.pi0[z[0]]) + p.log_lik(0, z[0]);
  for (std::size_t t = 1; t < z.size(); ++t)
    lp += std::log(p.Pi(z[t - 1], z[t])) + p.log_lik(static_cast<Eigen::Index>(t), z[t]);
  return lp;
}

// Exhaustive-enumeration marginal and path posterior.
inline double hmm_enumerate_marginal(const HmmProblem& p) {
  std::vector<double> terms;
  for (long q = 0; q < int_pow(p.K(), p.T()); ++q) terms.push_back(hmm_path_logjoint(p, decode_path(q, p.K(), p.T())));
  return log_sum_exp(terms);
}

inline std::vector<double> hmm_enumerate_posterior(const HmmProblem& p) {
  const long n = int_pow(p.K(), p.T());
  std::vector<double> lp(n);
  for (long q = 0; q < n; ++q) lp[q] = hmm_path_logjoint(p, decode_path(q, p.K(), p.T()));
  const double z = log_sum_exp(lp);
  for (auto& x : lp) x = std::exp(x - z);
  return lp;
}

inline Eigen::MatrixXd random_stochastic(int K, Rng& rng) {
  Eigen::MatrixXd P(K, K);
  for (int i = 0; i < K; ++i) P.row(i) = rng.dirichlet(Eigen::VectorXd::Ones(K)).transpose();
  return P;
}

inline HmmProblem random_hmm(int K, int T, Rng& rng) {
  HmmProblem p;
  p.pi0 = rng.dirichlet(Eigen::VectorXd::Ones(K));
  p.Pi = random_stochastic(K, rng);
  p.log_lik.resize(T, K);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) p.log_lik(t, k) = 3.0 * rng.normal();
  return p;
}

// Largest standardized deviation between empirical counts and probabilities
// (binomial standard error per cell).
inline double max_cell_z(const std::vector<long>& counts, const std::vector<double>& probs, long draws) {
  double worst = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    const double e = probs[c] * draws;
    const double sd = std::sqrt(draws * probs[c] * (1.0 - probs[c]));
    if (sd > 0) worst = std::max(worst, std::abs(counts[c] - e) / sd);
    else if (counts[c] != 0) worst = INFINITY;
  }
  return worst;
}

inline double dense_logpdf(const Eigen::MatrixXd& S, const Eigen::VectorXd& x) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * (x.size() * std::log(2.0 * std::numbers::pi) + logdet + x.dot(ldlt.solve(x)));
}

// Moments of x_i | x_S from the precision of the dense (i, S) marginal.
inline std::pair<double, double> dense_conditional(const Eigen::MatrixXd& S, int i, const std::vector<int>& nb,
                                            const Eigen::VectorXd& x) {
  std::vector<int> idx{i};
  idx.insert(idx.end(), nb.begin(), nb.end());
  Eigen::MatrixXd M(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) M(a, b) = S(idx[a], idx[b]);
  Eigen::MatrixXd P = M.inverse();
  double mean = 0.0;
  for (std::size_t a = 0; a < nb.size(); ++a) mean -= P(0, a + 1) * x[a];
  return {mean / P(0, 0), 1.0 / P(0, 0)};
}

// Decomposable test graphs with up to 16 nodes.
inline std::vector<DependencyGraph> test_graphs() {
  std::vector<DependencyGraph> g;
  g.push_back(DependencyGraph::edgeless(1));
  g.push_back(DependencyGraph::complete(2));
  g.push_back(DependencyGraph::path(5));
  g.push_back(DependencyGraph::edgeless(4));
  g.push_back(DependencyGraph::complete(6));
  g.push_back(DependencyGraph::grid(2, 3));
  g.push_back(DependencyGraph::grid(2, 8));
  g.push_back(DependencyGraph::path(16));
  g.push_back(DependencyGraph::complete(16));
  // star plus a disconnected triangle
  g.emplace_back(8, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {5, 6}, {5, 7}, {6, 7}});
  // chain of triangles
  g.emplace_back(7, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {2, 4},
                                                     {4, 5}, {4, 6}, {5, 6}});
  return g;
}

// Random SPD matrix with a dominant diagonal.
inline Eigen::MatrixXd random_spd(int n, Rng& rng) {
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index x = 0; x < M.size(); ++x) M.data()[x] = rng.normal();
  return M * M.transpose() / n + Eigen::MatrixXd::Identity(n, n);
}

// Channel marginal by enumeration over paths of the active features with a
// uniform initial distribution and row-normalized eta.
inline double channel_enumerate(const Eigen::MatrixXd& ll, const Eigen::MatrixXd& log_eta, const std::vector<int>& act) {
  const int Ka = static_cast<int>(act.size()), T = static_cast<int>(ll.rows());
  std::vector<double> terms;
  for (long q = 0; q < int_pow(Ka, T); ++q) {
    auto z = decode_path(q, Ka, T);
    double lp = -std::log(static_cast<double>(Ka)) + ll(0, act[z[0]]);
    for (int t = 1; t < T; ++t) {
      double norm = 0.0;
      for (int b : act) norm += std::exp(log_eta(act[z[t - 1]], b));
      lp += log_eta(act[z[t - 1]], act[z[t]]) - std::log(norm) + ll(t, act[z[t]]);
    }
    terms.push_back(lp);
  }
  return log_sum_exp(terms);
}

struct EventProblem {
  std::shared_ptr<const DependencyGraph> graph;
  std::vector<SparseCovariance> covs;
  Eigen::MatrixXd E, phi;
  int r = 1;
};

inline EventProblem random_event_problem(int L, int T, int N, Rng& rng) {
  EventProblem p;
  p.graph = std::make_shared<const DependencyGraph>(DependencyGraph::path(N));
  for (int l = 0; l < L; ++l) p.covs.push_back(sample_hiw(p.graph, N + 3.0, (0.5 + l) * Eigen::MatrixXd::Identity(N, N), rng));
  p.E = Eigen::MatrixXd::Zero(T, N);
  for (int t = p.r; t < T; ++t)
    for (int i = 0; i < N; ++i) p.E(t, i) = rng.normal();
  p.phi = random_stochastic(L, rng);
  return p;
}

// log p(eps | phi, Delta) over all Z paths; uniform initial state, rows t < r
// carry no likelihood.
inline std::vector<double> event_path_logjoint(const EventProblem& p) {
  const int L = static_cast<int>(p.covs.size()), T = static_cast<int>(p.E.rows());
  std::vector<double> out;
  for (long q = 0; q < int_pow(L, T); ++q) {
    auto Z = decode_path(q, L, T);
    double lp = -std::log(static_cast<double>(L));
    for (int t = 0; t < T; ++t) {
      if (t > 0) lp += std::log(p.phi(Z[t - 1], Z[t]));
      if (t >= p.r) lp += dense_logpdf(p.covs[Z[t]].delta(), p.E.row(t).transpose());
    }
    out.push_back(lp);
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("sfhmm_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// True when both trees hold the same relative paths with identical bytes.
inline bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::filesystem::path> fa, fb;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(std::filesystem::relative(e.path(), a));
  for (const auto& e : std::filesystem::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(std::filesystem::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& f : fa)
    if (read_bytes(a / f) != read_bytes(b / f)) return false;
  return true;
}

// Sample mean and standard error.
struct Moments {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / (v.size() - 1));
  m.se = m.sd / std::sqrt(static_cast<double>(v.size()));
  return m;
}

// Standard error of a correlated series by non-overlapping batch means.
inline Moments batch_moments(const std::vector<double>& v, int batches = 50) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += v[b * len + j];
    means.push_back(s / len);
  }
  return moments(means);
}

}  // namespace sfhmm::testing
