#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfhmm/ggm.hpp"
#include "sfhmm/rng.hpp"

namespace sfhmm {

// One event's view for the AR update. E holds current innovations and is
// updated in place after a_k changes.
struct ArEventView {
  const Eigen::MatrixXd* y = nullptr;
  const Eigen::MatrixXi* z = nullptr;
  const Eigen::VectorXi* Z = nullptr;
  const std::vector<SparseCovariance>* covs = nullptr;
  Eigen::MatrixXd* E = nullptr;
};

// Natural parameters of the Gaussian full conditional of a_k.
struct ArPosterior {
  Eigen::MatrixXd precision;
  Eigen::VectorXd shift;  // precision * mean
  Eigen::VectorXd mean() const { return precision.llt().solve(shift); }
};

ArPosterior ar_posterior(int k, const std::vector<ArEventView>& events, const Eigen::MatrixXd& A, int r,
                         const Eigen::VectorXd& m0, const Eigen::MatrixXd& Sigma0);

// Draws a_k, writes it into A and refreshes the innovations of channels
// currently in state k.
Eigen::VectorXd sample_ar_coefficient(int k, std::vector<ArEventView>& events, Eigen::MatrixXd& A, int r,
                                      const Eigen::VectorXd& m0, const Eigen::MatrixXd& Sigma0, Rng& rng);

}  // namespace sfhmm
