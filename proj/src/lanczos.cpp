#include "lanczos.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sbmest/errors.hpp"
#include "sbmest/rng.hpp"

namespace sbmest::detail {

namespace {

constexpr std::uint64_t kStartSeed = 0x5b3e57a1c2d40e11ULL;

Eigen::VectorXd deterministic_unit(int n, int salt) {
  Rng rng(kStartSeed + static_cast<std::uint64_t>(salt) * 0x9e3779b97f4a7c15ULL);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_normal();
  v.normalize();
  return v;
}

void reorthogonalize(const Eigen::MatrixXd& V, int m, Eigen::VectorXd& w) {
  // two Gram-Schmidt passes keep the basis orthonormal to machine precision
  for (int pass = 0; pass < 2; ++pass) {
    if (m == 0) break;
    const auto Vm = V.leftCols(m);
    w.noalias() -= Vm * (Vm.transpose() * w);
  }
}

void solve_ritz(const std::vector<double>& alpha, const std::vector<double>& beta,
                const Eigen::MatrixXd& V, double beta_next, LanczosSpectrum& out) {
  const int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  out.theta = es.eigenvalues();
  out.tri_vecs = es.eigenvectors();
  out.basis = V.leftCols(m);
  out.resid.resize(m);
  for (int j = 0; j < m; ++j) out.resid[j] = std::abs(beta_next * out.tri_vecs(m - 1, j));
  out.scale = out.theta.size() ? out.theta.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

LanczosSpectrum lanczos_spectrum(const SymOp& A,
                                 const std::function<bool(const LanczosSpectrum&)>& done,
                                 int max_steps) {
  const int n = A.size();
  const int m_max = std::min(n, max_steps);

  Eigen::MatrixXd V(n, m_max);
  std::vector<double> alpha, beta;
  alpha.reserve(m_max);
  beta.reserve(m_max);

  int restarts = 0;
  Eigen::VectorXd v = deterministic_unit(n, restarts);
  Eigen::VectorXd w(n), prev = Eigen::VectorXd::Zero(n);
  double beta_prev = 0.0;

  LanczosSpectrum out;
  int m = 0;
  const int check_every = 8;
  bool exhausted = false;

  while (m < m_max && !exhausted) {
    V.col(m) = v;
    A.apply(v, w);
    const double a = v.dot(w);
    w -= a * v;
    if (beta_prev != 0.0) w -= beta_prev * prev;
    reorthogonalize(V, m + 1, w);
    alpha.push_back(a);
    ++m;

    double b = w.norm();
    const double scale = std::max({std::abs(a), beta_prev, 1e-300});
    if (b <= 1e-13 * scale * n) {
      // invariant subspace: restart with a fresh deterministic direction
      b = 0.0;
      Eigen::VectorXd fresh;
      double norm = 0.0;
      for (int attempt = 0; attempt < 8 && norm <= 1e-8; ++attempt) {
        fresh = deterministic_unit(n, ++restarts);
        reorthogonalize(V, m, fresh);
        norm = fresh.norm();
      }
      if (norm <= 1e-8 || m >= m_max) {
        exhausted = true;
      } else {
        v = fresh / norm;
        prev.setZero();
        beta_prev = 0.0;
      }
      beta.push_back(0.0);
    } else {
      prev = V.col(m - 1);
      v = w / b;
      beta_prev = b;
      beta.push_back(b);
    }

    if (exhausted || m == m_max || m == n || (m % check_every == 0 && m >= 8)) {
      solve_ritz(alpha, beta, V, exhausted || m == n ? 0.0 : beta_prev, out);
      if (m == n || exhausted) break;
      if (done(out)) break;
    }
  }
  if (out.theta.size() == 0) solve_ritz(alpha, beta, V, 0.0, out);
  return out;
}

}  // namespace sbmest::detail
