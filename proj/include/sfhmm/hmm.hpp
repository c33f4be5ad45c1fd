#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfhmm/rng.hpp"

namespace sfhmm {

// Discrete-state HMM with log-space emission terms. log_lik entries may be
// -inf to exclude a state at a time point.
struct HmmProblem {
  Eigen::VectorXd pi0;  // K
  Eigen::MatrixXd Pi;   // K x K, row-stochastic
  Eigen::MatrixXd log_lik;  // T x K

  int K() const { return static_cast<int>(pi0.size()); }
  int T() const { return static_cast<int>(log_lik.rows()); }
};

// Throws PreconditionError when the problem violates its invariants.
void validate(const HmmProblem& p);

// log p(y_{1:T}) by normalized forward filtering; -inf when some time point
// has zero mass.
double forward_marginal(const HmmProblem& p);

// Joint posterior draw of z_{1:T} by backward filtering / forward sampling.
// Throws SamplingError carrying the offending time index.
std::vector<int> sample_states(const HmmProblem& p, Rng& rng);

}  // namespace sfhmm
