#include "sfhmm/ar.hpp"

#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

// ytilde_t^i, most recent lag first.
inline void lag_window(const Eigen::MatrixXd& y, int t, int i, int r, Eigen::VectorXd& out) {
  for (int p = 0; p < r; ++p) out[p] = y(t - 1 - p, i);
}

}  // namespace

ArPosterior ar_posterior(int k, const std::vector<ArEventView>& events, const Eigen::MatrixXd& A, int r,
                         const Eigen::VectorXd& m0, const Eigen::MatrixXd& Sigma0) {
  Eigen::LLT<Eigen::MatrixXd> s0(Sigma0);
  if (s0.info() != Eigen::Success) throw NumericError("AR prior covariance is not positive definite");
  ArPosterior post;
  post.precision = s0.solve(Eigen::MatrixXd::Identity(r, r));
  post.shift = s0.solve(m0);
  const Eigen::VectorXd ak = A.row(k).transpose();
  Eigen::VectorXd yi(r), yj(r);
  std::vector<int> plus;
  std::vector<char> in_plus;
  for (const auto& ev : events) {
    const Eigen::MatrixXd& y = *ev.y;
    const Eigen::MatrixXi& z = *ev.z;
    const Eigen::MatrixXd& E = *ev.E;
    const int T = static_cast<int>(y.rows()), N = static_cast<int>(y.cols());
    in_plus.assign(N, 0);
    for (int t = r; t < T; ++t) {
      plus.clear();
      for (int i = 0; i < N; ++i)
        if (z(t, i) == k) {
          plus.push_back(i);
          in_plus[i] = 1;
        }
      if (plus.empty()) continue;
      const SparseCovariance& cov = (*ev.covs)[(*ev.Z)[t]];
      const Eigen::MatrixXd& W = cov.omega();
      // u: innovations with the contribution of a_k removed.
      auto u = [&](int j) {
        if (!in_plus[j]) return E(t, j);
        double s = 0.0;
        for (int p = 0; p < r; ++p) s += ak[p] * y(t - 1 - p, j);
        return E(t, j) + s;
      };
      for (int i : plus) {
        lag_window(y, t, i, r, yi);
        double g = W(i, i) * u(i);
        post.precision.noalias() += W(i, i) * yi * yi.transpose();
        for (int j : cov.graph().neighbors(i)) {
          g += W(i, j) * u(j);
          if (in_plus[j]) {
            lag_window(y, t, j, r, yj);
            post.precision.noalias() += W(i, j) * yi * yj.transpose();
          }
        }
        post.shift.noalias() += g * yi;
      }
      for (int i : plus) in_plus[i] = 0;
    }
  }
  post.precision = 0.5 * (post.precision + post.precision.transpose()).eval();
  return post;
}

Eigen::VectorXd sample_ar_coefficient(int k, std::vector<ArEventView>& events, Eigen::MatrixXd& A, int r,
                                      const Eigen::VectorXd& m0, const Eigen::MatrixXd& Sigma0, Rng& rng) {
  ArPosterior post = ar_posterior(k, events, A, r, m0, Sigma0);
  Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
  if (llt.info() != Eigen::Success) throw NumericError("AR posterior precision is not positive definite");
  Eigen::VectorXd mean = llt.solve(post.shift);
  Eigen::VectorXd x(r);
  for (int p = 0; p < r; ++p) x[p] = rng.normal();
  // precision = U'U, so U^{-1} x has covariance precision^{-1}.
  Eigen::VectorXd a = mean + llt.matrixU().solve(x);
  A.row(k) = a.transpose();
  for (auto& ev : events) {
    const Eigen::MatrixXd& y = *ev.y;
    const Eigen::MatrixXi& z = *ev.z;
    Eigen::MatrixXd& E = *ev.E;
    for (int t = r; t < y.rows(); ++t)
      for (int i = 0; i < y.cols(); ++i)
        if (z(t, i) == k) {
          double s = 0.0;
          for (int p = 0; p < r; ++p) s += a[p] * y(t - 1 - p, i);
          E(t, i) = y(t, i) - s;
        }
  }
  return a;
}

}  // namespace sfhmm
