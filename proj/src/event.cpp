#include "sfhmm/event.hpp"

#include "sfhmm/hmm.hpp"
#include "sfhmm/kernels.hpp"

namespace sfhmm {

namespace {

HmmProblem event_problem(const Eigen::MatrixXd& E, const Eigen::MatrixXd& phi,
                         const std::vector<SparseCovariance>& deltas, int r) {
  const int L = static_cast<int>(deltas.size());
  HmmProblem p;
  p.pi0 = Eigen::VectorXd::Constant(L, 1.0 / L);
  p.Pi = phi;
  for (int l = 0; l < L; ++l) p.Pi.row(l) /= p.Pi.row(l).sum();
  p.log_lik = event_loglik(E, deltas, r);
  return p;
}

}  // namespace

std::vector<int> sample_event_states(const Eigen::MatrixXd& E, const Eigen::MatrixXd& phi,
                                     const std::vector<SparseCovariance>& deltas, int r, Rng& rng) {
  return sample_states(event_problem(E, phi, deltas, r), rng);
}

double event_marginal_loglik(const Eigen::MatrixXd& E, const Eigen::MatrixXd& phi,
                             const std::vector<SparseCovariance>& deltas, int r) {
  return forward_marginal(event_problem(E, phi, deltas, r));
}

Eigen::MatrixXi event_transition_counts(const Eigen::Ref<const Eigen::VectorXi>& Z, int L) {
  Eigen::MatrixXi n = Eigen::MatrixXi::Zero(L, L);
  for (Eigen::Index t = 1; t < Z.size(); ++t) ++n(Z[t - 1], Z[t]);
  return n;
}

Eigen::MatrixXd sample_phi(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double alpha_e, double kappa_e,
                           Rng& rng) {
  const int L = static_cast<int>(beta.size());
  Eigen::MatrixXd phi(L, L);
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd a = alpha_e * beta + n.row(l).transpose().cast<double>();
    a[l] += kappa_e;
    phi.row(l) = rng.dirichlet(a).transpose();
  }
  return phi;
}

Eigen::MatrixXi sample_table_counts(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double alpha_e,
                                    double kappa_e, Rng& rng) {
  const int L = static_cast<int>(beta.size());
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(L, L);
  for (int l = 0; l < L; ++l)
    for (int lp = 0; lp < L; ++lp) {
      const double theta = alpha_e * beta[lp] + (l == lp ? kappa_e : 0.0);
      int tables = 0;
      for (int j = 1; j <= n(l, lp); ++j)
        if (rng.bernoulli(theta / (theta + j - 1.0))) ++tables;
      m(l, lp) = tables;
    }
  return m;
}

Eigen::VectorXi sample_override_counts(const Eigen::MatrixXi& m, const Eigen::VectorXd& beta, double rho_e,
                                       Rng& rng) {
  const int L = static_cast<int>(beta.size());
  Eigen::VectorXi w = Eigen::VectorXi::Zero(L);
  for (int l = 0; l < L; ++l) {
    if (m(l, l) == 0 || rho_e <= 0.0) continue;
    const double p = rho_e / (rho_e + beta[l] * (1.0 - rho_e));
    w[l] = static_cast<int>(rng.binomial(m(l, l), p));
  }
  return w;
}

Eigen::MatrixXi corrected_table_counts(const Eigen::MatrixXi& m, const Eigen::VectorXi& w) {
  Eigen::MatrixXi mbar = m;
  for (Eigen::Index l = 0; l < w.size(); ++l) mbar(l, l) -= w[l];
  return mbar;
}

Eigen::VectorXd sample_beta_given_tables(const Eigen::MatrixXi& mbar, double gamma_e, Rng& rng) {
  const int L = static_cast<int>(mbar.rows());
  Eigen::VectorXd a = Eigen::VectorXd::Constant(L, gamma_e / L) + mbar.colwise().sum().transpose().cast<double>();
  return rng.dirichlet(a);
}

Eigen::VectorXd sample_beta(const Eigen::MatrixXi& n, const Eigen::VectorXd& beta, double gamma_e, double alpha_e,
                            double kappa_e, double rho_e, Rng& rng, BetaAuxiliaries* aux) {
  BetaAuxiliaries local;
  BetaAuxiliaries& x = aux ? *aux : local;
  x.m = sample_table_counts(n, beta, alpha_e, kappa_e, rng);
  x.w = sample_override_counts(x.m, beta, rho_e, rng);
  x.mbar = corrected_table_counts(x.m, x.w);
  return sample_beta_given_tables(x.mbar, gamma_e, rng);
}

StateScatter innovation_scatter(const std::vector<const Eigen::MatrixXd*>& innovations,
                                const std::vector<const Eigen::VectorXi*>& Z, int L, int r) {
  const int N = static_cast<int>(innovations.at(0)->cols());
  StateScatter s;
  s.count.assign(L, 0);
  s.scatter.assign(L, Eigen::MatrixXd::Zero(N, N));
  for (std::size_t e = 0; e < innovations.size(); ++e) {
    const Eigen::MatrixXd& E = *innovations[e];
    for (int t = r; t < E.rows(); ++t) {
      const int l = (*Z[e])[t];
      ++s.count[l];
      s.scatter[l].selfadjointView<Eigen::Lower>().rankUpdate(E.row(t).transpose());
    }
  }
  for (auto& m : s.scatter) {
    Eigen::MatrixXd full = m.selfadjointView<Eigen::Lower>();
    m = full;
  }
  return s;
}

std::vector<SparseCovariance> sample_deltas(const StateScatter& s, double b0, const Eigen::MatrixXd& D0,
                                            const std::shared_ptr<const DependencyGraph>& graph, Rng& rng) {
  std::vector<SparseCovariance> out;
  out.reserve(s.count.size());
  for (std::size_t l = 0; l < s.count.size(); ++l)
    out.push_back(sample_hiw(graph, b0 + static_cast<double>(s.count[l]), D0 + s.scatter[l], rng));
  return out;
}

}  // namespace sfhmm
