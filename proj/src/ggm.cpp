#include "sfhmm/ggm.hpp"

#include <cmath>
#include <numbers>

#include "sfhmm/errors.hpp"
#include "sfhmm/log.hpp"

namespace sfhmm {

namespace {

constexpr double kSigma2Floor = 1e-12;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Eigen::MatrixXd sub(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

double llt_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Quadratic form x_idx' Sigma_idx^{-1} x_idx.
double block_quad(const Eigen::LLT<Eigen::MatrixXd>& llt, const std::vector<int>& idx,
                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd xs(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) xs[a] = x[idx[a]];
  llt.matrixL().solveInPlace(xs);
  return xs.squaredNorm();
}

void check_spd(const Eigen::MatrixXd& D, const char* what) {
  if (D.rows() != D.cols() || !D.isApprox(D.transpose(), 1e-10))
    throw PreconditionError(std::string(what) + " must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(D);
  if (llt.info() != Eigen::Success) throw PreconditionError(std::string(what) + " must be positive definite");
}

}  // namespace

SparseCovariance::SparseCovariance(std::shared_ptr<const DependencyGraph> graph, Eigen::MatrixXd delta)
    : graph_(std::move(graph)), delta_(std::move(delta)) {
  const int N = graph_->node_count();
  if (delta_.rows() != N || delta_.cols() != N)
    throw PreconditionError("covariance size does not match graph");
  delta_ = 0.5 * (delta_ + delta_.transpose()).eval();
  omega_ = Eigen::MatrixXd::Zero(N, N);
  log_det_ = 0.0;
  const auto& cliques = graph_->cliques();
  const auto& seps = graph_->separators();
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    Eigen::LLT<Eigen::MatrixXd> llt(sub(delta_, cliques[c], cliques[c]));
    if (llt.info() != Eigen::Success)
      throw NumericError("covariance block of clique " + std::to_string(c) + " is not positive definite");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(cliques[c].size(), cliques[c].size()));
    for (std::size_t a = 0; a < cliques[c].size(); ++a)
      for (std::size_t b = 0; b < cliques[c].size(); ++b) omega_(cliques[c][a], cliques[c][b]) += inv(a, b);
    log_det_ += llt_log_det(llt);
    clique_llt_.push_back(std::move(llt));
  }
  for (std::size_t s = 0; s < seps.size(); ++s) {
    if (seps[s].empty()) {
      sep_llt_.emplace_back();
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sub(delta_, seps[s], seps[s]));
    if (llt.info() != Eigen::Success)
      throw NumericError("covariance block of separator " + std::to_string(s) + " is not positive definite");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(seps[s].size(), seps[s].size()));
    for (std::size_t a = 0; a < seps[s].size(); ++a)
      for (std::size_t b = 0; b < seps[s].size(); ++b) omega_(seps[s][a], seps[s][b]) -= inv(a, b);
    log_det_ -= llt_log_det(llt);
    sep_llt_.push_back(std::move(llt));
  }
  omega_ = 0.5 * (omega_ + omega_.transpose()).eval();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j && !graph_->has_edge(i, j)) omega_(i, j) = 0.0;

  coef_.resize(N);
  sigma2_.resize(N);
  log_norm_.resize(N);
  for (int i = 0; i < N; ++i) {
    const auto& nb = graph_->neighbors(i);
    double w = omega_(i, i);
    double s2 = w > 0.0 ? 1.0 / w : 0.0;
    if (!(s2 >= kSigma2Floor)) {
      warn("conditional variance of channel " + std::to_string(i) + " floored at 1e-12");
      s2 = kSigma2Floor;
    }
    sigma2_[i] = s2;
    log_norm_[i] = -0.5 * (kLog2Pi + std::log(s2));
    coef_[i].resize(nb.size());
    for (std::size_t a = 0; a < nb.size(); ++a) coef_[i][a] = w > 0.0 ? -omega_(i, nb[a]) / w : 0.0;
  }
}

double SparseCovariance::logpdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const auto& cliques = graph_->cliques();
  const auto& seps = graph_->separators();
  double quad = 0.0;
  for (std::size_t c = 0; c < cliques.size(); ++c) quad += block_quad(clique_llt_[c], cliques[c], x);
  for (std::size_t s = 0; s < seps.size(); ++s)
    if (!seps[s].empty()) quad -= block_quad(sep_llt_[s], seps[s], x);
  return -0.5 * (N() * kLog2Pi + log_det_ + quad);
}

double gaussian_logpdf(const SparseCovariance& cov, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return cov.logpdf(x);
}

ConditionalMoments conditional_moments(const SparseCovariance& cov, int i, const std::vector<int>& nb,
                                       const Eigen::VectorXd& residual) {
  const auto& D = cov.delta();
  if (static_cast<std::size_t>(residual.size()) != nb.size())
    throw PreconditionError("neighbor residual length mismatch");
  for (int j : nb) {
    if (j == i) throw PreconditionError("channel cannot condition on itself");
    if (!cov.graph().has_edge(i, j))
      throw PreconditionError("conditioning set must lie inside the graph neighbors");
  }
  if (nb.empty()) return {0.0, std::max(D(i, i), kSigma2Floor)};
  Eigen::MatrixXd Dnn = sub(D, nb, nb);
  Eigen::VectorXd Dni(nb.size());
  for (std::size_t a = 0; a < nb.size(); ++a) Dni[a] = D(nb[a], i);
  Eigen::LLT<Eigen::MatrixXd> llt(Dnn);
  if (llt.info() != Eigen::Success) throw NumericError("neighbor covariance block is singular");
  Eigen::VectorXd w = llt.solve(Dni);
  double s2 = D(i, i) - Dni.dot(w);
  if (!(s2 >= kSigma2Floor)) {
    warn("conditional variance of channel " + std::to_string(i) + " floored at 1e-12");
    s2 = kSigma2Floor;
  }
  return {w.dot(residual), s2};
}

Eigen::MatrixXd sample_iw(double delta, const Eigen::MatrixXd& D, Rng& rng) {
  const int p = static_cast<int>(D.rows());
  if (!(delta > 0.0)) throw PreconditionError("inverse-Wishart degrees of freedom must be positive");
  Eigen::LLT<Eigen::MatrixXd> llt(D);
  if (llt.info() != Eigen::Success) throw PreconditionError("inverse-Wishart scale is not positive definite");
  const double nu = delta + p - 1.0;
  // Bartlett factor of Wishart(nu, I).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    A(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (nu - i), 1.0));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  // Sigma^{-1} = L^{-T} A A' L^{-1}  =>  Sigma = (L A^{-T})(L A^{-T})'.
  Eigen::MatrixXd Ainv = A.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd G = llt.matrixL() * Ainv.transpose();
  Eigen::MatrixXd S = G * G.transpose();
  return 0.5 * (S + S.transpose());
}

SparseCovariance sample_hiw(std::shared_ptr<const DependencyGraph> graph, double b, const Eigen::MatrixXd& D,
                            Rng& rng) {
  const int N = graph->node_count();
  if (D.rows() != N) throw PreconditionError("HIW scale size does not match graph");
  check_spd(D, "HIW scale");
  if (!(b > 0.0)) throw PreconditionError("HIW degrees of freedom must be positive");
  const auto& cliques = graph->cliques();
  const auto& seps = graph->separators();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  std::vector<char> covered(N, 0);
  std::vector<int> covered_list;

  auto put = [&](const std::vector<int>& rows, const std::vector<int>& cols, const Eigen::MatrixXd& m) {
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t c = 0; c < cols.size(); ++c) {
        S(rows[a], cols[c]) = m(a, c);
        S(cols[c], rows[a]) = m(a, c);
      }
  };

  for (std::size_t j = 0; j < cliques.size(); ++j) {
    const auto& C = cliques[j];
    std::vector<int> sep = j == 0 ? std::vector<int>{} : seps[j - 1];
    std::vector<int> R;
    for (int v : C)
      if (!covered[v]) R.push_back(v);
    std::vector<int> others;
    for (int v : covered_list)
      if (std::find(sep.begin(), sep.end(), v) == sep.end()) others.push_back(v);

    if (sep.empty()) {
      Eigen::MatrixXd draw = sample_iw(b, sub(D, R, R), rng);
      Eigen::LLT<Eigen::MatrixXd> chk(draw);
      if (chk.info() != Eigen::Success) throw NumericError("degenerate HIW draw in clique " + std::to_string(j));
      put(R, R, draw);
    } else {
      Eigen::MatrixXd Dss = sub(D, sep, sep), Dsr = sub(D, sep, R), Drr = sub(D, R, R);
      Eigen::LLT<Eigen::MatrixXd> lss(Dss);
      Eigen::MatrixXd mean = lss.solve(Dsr);
      Eigen::MatrixXd Drs = Drr - Dsr.transpose() * mean;
      Drs = 0.5 * (Drs + Drs.transpose()).eval();
      Eigen::MatrixXd cond = sample_iw(b + static_cast<double>(sep.size()), Drs, rng);
      Eigen::LLT<Eigen::MatrixXd> lcond(cond);
      if (lcond.info() != Eigen::Success)
        throw NumericError("degenerate HIW draw in clique " + std::to_string(j));
      Eigen::MatrixXd X(sep.size(), R.size());
      for (Eigen::Index a = 0; a < X.rows(); ++a)
        for (Eigen::Index c = 0; c < X.cols(); ++c) X(a, c) = rng.normal();
      // Row covariance Dss^{-1} with square root L_ss^{-T}.
      Eigen::MatrixXd rowf = lss.matrixU().solve(X);
      Eigen::MatrixXd B = mean + rowf * lcond.matrixL().transpose();
      Eigen::MatrixXd Sss = sub(S, sep, sep);
      Eigen::MatrixXd Ssr = Sss * B;
      Eigen::MatrixXd Srr = cond + B.transpose() * Sss * B;
      put(sep, R, Ssr);
      put(R, R, 0.5 * (Srr + Srr.transpose()));
      if (!others.empty()) put(R, others, B.transpose() * sub(S, sep, others));
    }
    for (int v : R) {
      covered[v] = 1;
      covered_list.push_back(v);
    }
  }
  return SparseCovariance(std::move(graph), S);
}

HiwParams hiw_posterior_params(double b0, const Eigen::MatrixXd& D0, const std::vector<Eigen::VectorXd>& eps) {
  HiwParams p{b0 + static_cast<double>(eps.size()), D0};
  for (const auto& e : eps) p.D.noalias() += e * e.transpose();
  return p;
}

Eigen::MatrixXd complete_on_graph(const DependencyGraph& g, const Eigen::MatrixXd& M) {
  const int N = g.node_count();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  std::vector<char> covered(N, 0);
  std::vector<int> covered_list;
  const auto& cliques = g.cliques();
  const auto& seps = g.separators();
  for (std::size_t j = 0; j < cliques.size(); ++j) {
    const auto& C = cliques[j];
    std::vector<int> sep = j == 0 ? std::vector<int>{} : seps[j - 1];
    std::vector<int> R, others;
    for (int v : C)
      if (!covered[v]) R.push_back(v);
    for (int v : covered_list)
      if (std::find(sep.begin(), sep.end(), v) == sep.end()) others.push_back(v);
    for (int a : C)
      for (int c : C) S(a, c) = M(a, c);
    if (!sep.empty() && !others.empty()) {
      Eigen::MatrixXd Bt = sub(S, sep, sep).llt().solve(sub(S, sep, R)).transpose();
      Eigen::MatrixXd cross = Bt * sub(S, sep, others);
      for (std::size_t a = 0; a < R.size(); ++a)
        for (std::size_t c = 0; c < others.size(); ++c) S(R[a], others[c]) = S(others[c], R[a]) = cross(a, c);
    }
    for (int v : R) {
      covered[v] = 1;
      covered_list.push_back(v);
    }
  }
  return S;
}

}  // namespace sfhmm
