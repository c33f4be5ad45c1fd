#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sfhmm/graph.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// Covariance whose precision is zero off the graph's edges. Clique and
// separator Cholesky factors, the precision, and per-channel conditional
// regressions on graph neighbors are built eagerly; the object is immutable.
class SparseCovariance {
 public:
  SparseCovariance() = default;
  // Delta must already respect the graph (its inverse zero at non-edges);
  // the precision is assembled from clique and separator blocks so its
  // non-edge entries are exactly zero.
  SparseCovariance(std::shared_ptr<const DependencyGraph> graph, Eigen::MatrixXd delta);

  const DependencyGraph& graph() const { return *graph_; }
  std::shared_ptr<const DependencyGraph> graph_ptr() const { return graph_; }
  const Eigen::MatrixXd& delta() const { return delta_; }
  const Eigen::MatrixXd& omega() const { return omega_; }
  int N() const { return static_cast<int>(delta_.rows()); }
  double log_det() const { return log_det_; }

  // Conditional of channel i given all its graph neighbors:
  // mean = sum_j coef(i)[j] * x[neighbors(i)[j]], variance sigma2(i).
  const Eigen::VectorXd& coef(int i) const { return coef_[i]; }
  double sigma2(int i) const { return sigma2_[i]; }
  // -0.5 log(2 pi sigma2(i)).
  double log_norm(int i) const { return log_norm_[i]; }

  // log N(x; 0, Delta) through the clique/separator factorization.
  double logpdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::shared_ptr<const DependencyGraph> graph_;
  Eigen::MatrixXd delta_;
  Eigen::MatrixXd omega_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> clique_llt_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> sep_llt_;
  std::vector<Eigen::VectorXd> coef_;
  std::vector<double> sigma2_;
  std::vector<double> log_norm_;
  double log_det_ = 0.0;
};

double gaussian_logpdf(const SparseCovariance& cov, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ConditionalMoments {
  double mu_shift;
  double sigma2;
};

// Moments of x_i given x_{i'} = residual_neighbors, where i' is any subset of
// the graph neighbors of i (i not in i').
ConditionalMoments conditional_moments(const SparseCovariance& cov, int i,
                                       const std::vector<int>& neighbors,
                                       const Eigen::VectorXd& residual_neighbors);

// Inverse-Wishart in the Dawid-Lauritzen parameterization: for p dimensions
// Sigma ~ IW(delta, D) iff Sigma^{-1} ~ Wishart(delta + p - 1, D^{-1}), so
// E[Sigma] = D / (delta - 2) and the 1x1 case is InvGamma(delta/2, D/2).
Eigen::MatrixXd sample_iw(double delta, const Eigen::MatrixXd& D, Rng& rng);

// Delta ~ HIW_G(b, D) by sequential clique sampling along the junction tree.
SparseCovariance sample_hiw(std::shared_ptr<const DependencyGraph> graph, double b,
                            const Eigen::MatrixXd& D, Rng& rng);

struct HiwParams {
  double b;
  Eigen::MatrixXd D;
};

// (b0 + n, D0 + sum eps eps'), innovations as rows.
HiwParams hiw_posterior_params(double b0, const Eigen::MatrixXd& D0,
                               const std::vector<Eigen::VectorXd>& innovations);

// Fills the non-edge entries of a matrix specified on the cliques so that its
// inverse vanishes off the edges. Entries outside the cliques are ignored.
Eigen::MatrixXd complete_on_graph(const DependencyGraph& g, const Eigen::MatrixXd& clique_values);

}  // namespace sfhmm
