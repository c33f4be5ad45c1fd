#include "sfhmm/kernels.hpp"

#include <cmath>

namespace sfhmm {

namespace {

inline double ar_predict(const Eigen::MatrixXd& y, int t, int i, const double* a, int r) {
  double s = 0.0;
  for (int p = 0; p < r; ++p) s += a[p] * y(t - 1 - p, i);
  return s;
}

// Conditional shift and log-normalizer of channel i at time t.
inline void conditional_at(const ChannelLikInputs& in, int i, int t, double& shift, double& inv2s2,
                           double& lognorm) {
  const SparseCovariance& cov = (*in.covs)[(*in.Z)[t]];
  const auto& nb = cov.graph().neighbors(i);
  const Eigen::VectorXd& c = cov.coef(i);
  const Eigen::MatrixXd& E = *in.E;
  shift = 0.0;
  for (std::size_t j = 0; j < nb.size(); ++j) shift += c[j] * E(t, nb[j]);
  inv2s2 = 0.5 / cov.sigma2(i);
  lognorm = cov.log_norm(i);
}

void channel_rows(const ChannelLikInputs& in, int i, const std::vector<int>& features, Eigen::MatrixXd& out,
                  int t0, int t1) {
  const Eigen::MatrixXd& y = *in.y;
  const Eigen::MatrixXd& A = *in.A;
  const int r = in.r;
  const int K = static_cast<int>(features.size());
  // Row-major copy of the needed AR vectors.
  std::vector<double> coeffs(static_cast<std::size_t>(K) * r);
  for (int c = 0; c < K; ++c)
    for (int p = 0; p < r; ++p) coeffs[static_cast<std::size_t>(c) * r + p] = A(features[c], p);
  for (int t = t0; t < t1; ++t) {
    double shift, inv2s2, lognorm;
    conditional_at(in, i, t, shift, inv2s2, lognorm);
    const double target = y(t, i) - shift;
    for (int c = 0; c < K; ++c) {
      const double d = target - ar_predict(y, t, i, &coeffs[static_cast<std::size_t>(c) * r], r);
      out(t, c) = lognorm - d * d * inv2s2;
    }
  }
}

}  // namespace

void channel_loglik(const ChannelLikInputs& in, int i, const std::vector<int>& features, Eigen::MatrixXd& out,
                    Exec exec) {
  const int T = static_cast<int>(in.y->rows());
  out.setZero(T, static_cast<Eigen::Index>(features.size()));
  const int r = in.r;
  if (exec == Exec::serial) {
    channel_rows(in, i, features, out, r, T);
    return;
  }
  constexpr int kBlock = 256;
  const int nblocks = (T - r + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nblocks; ++b) {
    const int t0 = r + b * kBlock;
    channel_rows(in, i, features, out, t0, std::min(T, t0 + kBlock));
  }
}

void channel_loglik_column(const ChannelLikInputs& in, int i, const Eigen::VectorXd& a,
                           Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::MatrixXd& y = *in.y;
  const int T = static_cast<int>(y.rows());
  out.setZero();
  for (int t = in.r; t < T; ++t) {
    double shift, inv2s2, lognorm;
    conditional_at(in, i, t, shift, inv2s2, lognorm);
    const double d = y(t, i) - shift - ar_predict(y, t, i, a.data(), in.r);
    out[t] = lognorm - d * d * inv2s2;
  }
}

void all_channel_loglik(const ChannelLikInputs& in, std::vector<Eigen::MatrixXd>& out, Exec exec) {
  const int N = static_cast<int>(in.y->cols());
  const int K = static_cast<int>(in.A->rows());
  const int T = static_cast<int>(in.y->rows());
  std::vector<int> features(K);
  for (int k = 0; k < K; ++k) features[k] = k;
  out.resize(N);
  for (auto& m : out) m.setZero(T, K);
  if (exec == Exec::serial) {
    for (int i = 0; i < N; ++i) channel_rows(in, i, features, out[i], in.r, T);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < N; ++i) channel_rows(in, i, features, out[i], in.r, T);
}

Eigen::MatrixXd extract_innovations(const Eigen::MatrixXd& y, const Eigen::MatrixXi& z, const Eigen::MatrixXd& A,
                                    int r) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  for (int i = 0; i < y.cols(); ++i) update_innovation_column(y, z, A, r, i, E);
  return E;
}

void update_innovation_column(const Eigen::MatrixXd& y, const Eigen::MatrixXi& z, const Eigen::MatrixXd& A,
                              int r, int i, Eigen::MatrixXd& E) {
  const int T = static_cast<int>(y.rows());
  for (int t = 0; t < r && t < T; ++t) E(t, i) = 0.0;
  for (int t = r; t < T; ++t) {
    const int k = z(t, i);
    double s = 0.0;
    for (int p = 0; p < r; ++p) s += A(k, p) * y(t - 1 - p, i);
    E(t, i) = y(t, i) - s;
  }
}

Eigen::MatrixXd event_loglik(const Eigen::MatrixXd& E, const std::vector<SparseCovariance>& covs, int r,
                             Exec exec) {
  const int T = static_cast<int>(E.rows());
  const int L = static_cast<int>(covs.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, L);
  Eigen::MatrixXd Et = E.transpose();
  if (exec == Exec::serial) {
    for (int t = r; t < T; ++t)
      for (int l = 0; l < L; ++l) out(t, l) = covs[l].logpdf(Et.col(t));
  } else {
#pragma omp parallel for schedule(static)
    for (int t = r; t < T; ++t)
      for (int l = 0; l < L; ++l) out(t, l) = covs[l].logpdf(Et.col(t));
  }
  return out;
}

}  // namespace sfhmm
