#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfhmm/ggm.hpp"

namespace sfhmm {

enum class Exec { serial, parallel };

// Inputs of the per-channel conditional likelihood pass. E holds the current
// innovations of every channel (only graph neighbors of i are read); Z picks
// the covariance per time point. Rows t < r are left at 0.
struct ChannelLikInputs {
  const Eigen::MatrixXd* y = nullptr;  // T x N
  int r = 1;
  const Eigen::MatrixXd* A = nullptr;  // K x r library
  const Eigen::MatrixXd* E = nullptr;  // T x N innovations
  const Eigen::VectorXi* Z = nullptr;  // T
  const std::vector<SparseCovariance>* covs = nullptr;  // per event state
};

// out(t, c) = log N(y_t^i; a_{features[c]}' ytilde_t^i + shift_t, sigma2_t).
void channel_loglik(const ChannelLikInputs& in, int i, const std::vector<int>& features,
                    Eigen::MatrixXd& out, Exec exec = Exec::serial);

// One column for an AR vector that is not (yet) in the library.
void channel_loglik_column(const ChannelLikInputs& in, int i, const Eigen::VectorXd& a,
                           Eigen::Ref<Eigen::VectorXd> out);

// Likelihood pass over all channels with every library feature, as timed by
// the scaling benchmark. out[i] is T x K.
void all_channel_loglik(const ChannelLikInputs& in, std::vector<Eigen::MatrixXd>& out, Exec exec);

// eps_t^i = y_t^i - a_{z_t^i}' ytilde_t^i for t >= r; rows t < r are 0.
Eigen::MatrixXd extract_innovations(const Eigen::MatrixXd& y, const Eigen::MatrixXi& z,
                                    const Eigen::MatrixXd& A, int r);
void update_innovation_column(const Eigen::MatrixXd& y, const Eigen::MatrixXi& z, const Eigen::MatrixXd& A,
                              int r, int i, Eigen::MatrixXd& E);

// T x L matrix of log N(eps_t; 0, Delta_l), rows t < r left at 0.
Eigen::MatrixXd event_loglik(const Eigen::MatrixXd& E, const std::vector<SparseCovariance>& covs, int r,
                             Exec exec = Exec::serial);

}  // namespace sfhmm
