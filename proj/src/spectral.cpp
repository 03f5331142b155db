#include "sbmest/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lanczos.hpp"
#include "sbmest/errors.hpp"

namespace sbmest {

namespace {

// Full dense decompositions stay exact and cheap up to this size; larger
// problems go through the certified Lanczos path.
constexpr int kDenseCutoff = 800;
constexpr double kResidualTol = 1e-6;
constexpr double kModulusTieTol = 1e-10;

std::vector<int> modulus_order(const Eigen::VectorXd& w) {
  std::vector<int> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(w[a]), mb = std::abs(w[b]);
    if (ma != mb) return ma > mb;
    if ((w[a] > 0) != (w[b] > 0)) return w[a] > 0;
    return a < b;
  });
  return idx;
}

Embedding finalize_embedding(const SymOp& A, Eigen::MatrixXd U, Eigen::VectorXd lambda,
                             double next_modulus) {
  fix_column_signs(U);
  Embedding emb;
  emb.d = static_cast<int>(lambda.size());
  emb.U = std::move(U);
  emb.lambda = std::move(lambda);

  double scale = emb.lambda.size() ? emb.lambda.cwiseAbs().maxCoeff() : 0.0;
  scale = std::max(scale, next_modulus);
  Eigen::VectorXd y(A.size());
  double worst = 0.0;
  for (int j = 0; j < emb.d; ++j) {
    const Eigen::VectorXd u = emb.U.col(j);
    A.apply(u, y);
    worst = std::max(worst, (y - emb.lambda[j] * u).norm());
  }
  emb.residual = worst;
  if (scale > 0.0 && worst > kResidualTol * scale)
    throw ConvergenceFailureError("eigenpair residual above 1e-6 * ||A||");
  if (next_modulus >= 0.0 &&
      std::abs(std::abs(emb.lambda[emb.d - 1]) - next_modulus) < kModulusTieTol)
    emb.modulus_tie = true;
  return emb;
}

Embedding dense_top_eigenpairs(const SymOp& A, const Eigen::MatrixXd& M, int d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw ConvergenceFailureError("dense eigensolver failed");
  const Eigen::VectorXd w = es.eigenvalues();
  const std::vector<int> order = modulus_order(w);
  const int n = static_cast<int>(M.rows());

  Eigen::MatrixXd U(n, d);
  Eigen::VectorXd lambda(d);
  for (int j = 0; j < d; ++j) {
    U.col(j) = es.eigenvectors().col(order[j]);
    lambda[j] = w[order[j]];
  }
  const double next = d < n ? std::abs(w[order[d]]) : -1.0;
  return finalize_embedding(A, std::move(U), std::move(lambda), next);
}

Eigen::MatrixXd materialize(const SymOp& A) {
  const int n = A.size();
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    A.apply(e, col);
    M.col(j) = col;
    e[j] = 0.0;
  }
  return M;
}

Embedding lanczos_top_eigenpairs(const SymOp& A, int d) {
  const int n = A.size();
  const int want = std::min(d + 1, n);
  auto converged_top = [&](const detail::LanczosSpectrum& s) {
    if (s.theta.size() < want) return false;
    const std::vector<int> order = modulus_order(s.theta);
    for (int j = 0; j < want; ++j)
      if (s.resid[order[j]] > 1e-9 * std::max(s.scale, 1e-300)) return false;
    return true;
  };
  const detail::LanczosSpectrum spec = detail::lanczos_spectrum(A, converged_top);
  if (spec.theta.size() < d) throw ConvergenceFailureError("Lanczos basis too small");

  const std::vector<int> order = modulus_order(spec.theta);
  Eigen::MatrixXd U(n, d);
  Eigen::VectorXd lambda(d);
  for (int j = 0; j < d; ++j) {
    U.col(j) = spec.ritz_vector(order[j]);
    U.col(j).normalize();
    lambda[j] = spec.theta[order[j]];
  }
  const double next =
      static_cast<int>(spec.theta.size()) > d ? std::abs(spec.theta[order[d]]) : -1.0;
  return finalize_embedding(A, std::move(U), std::move(lambda), next);
}

}  // namespace

double DenseOp::max_row_sum() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A_.rows(); ++i) best = std::max(best, A_.row(i).sum());
  return best;
}

Embedding top_eigenpairs(const SymOp& A, int d) {
  const int n = A.size();
  if (d < 1 || d > n) throw OutOfRangeError("embedding dimension must lie in [1, n]");
  if (n <= kDenseCutoff || d > n / 4) return dense_top_eigenpairs(A, materialize(A), d);
  return lanczos_top_eigenpairs(A, d);
}

Embedding top_eigenpairs(const Eigen::MatrixXd& A, int d) {
  DenseOp op(A);
  const int n = op.size();
  if (d < 1 || d > n) throw OutOfRangeError("embedding dimension must lie in [1, n]");
  if (n <= kDenseCutoff || d > n / 4) return dense_top_eigenpairs(op, A, d);
  return lanczos_top_eigenpairs(op, d);
}

Embedding top_eigenpairs(const GraphSample& g, int d) {
  GraphOp op(g);
  return top_eigenpairs(static_cast<const SymOp&>(op), d);
}

double rank_threshold(const SymOp& A) { return 4.0 * std::sqrt(std::max(0.0, A.max_row_sum())); }

int estimate_rank(const SymOp& A) {
  const int n = A.size();
  const double t = rank_threshold(A);

  if (n <= kDenseCutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(materialize(A), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd w = es.eigenvalues();
    int count = 0;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (std::abs(w[j]) > t) ++count;
    return count;
  }

  // Count strictly above t once every Ritz value near or above the threshold
  // is certified; eigenvalues below 0.9 t cannot affect the count.
  auto settled = [&](const detail::LanczosSpectrum& s) {
    if (s.theta.size() == 0) return false;
    for (Eigen::Index j = 0; j < s.theta.size(); ++j)
      if (std::abs(s.theta[j]) + s.resid[j] > 0.9 * t &&
          s.resid[j] > 1e-8 * std::max(s.scale, 1e-300))
        return false;
    return true;
  };
  const detail::LanczosSpectrum spec = detail::lanczos_spectrum(A, settled);
  int count = 0;
  for (Eigen::Index j = 0; j < spec.theta.size(); ++j)
    if (std::abs(spec.theta[j]) > t &&
        spec.resid[j] <= 1e-6 * std::max(spec.scale, 1e-300))
      ++count;
  return count;
}

int estimate_rank(const Eigen::MatrixXd& A) {
  DenseOp op(A);
  return estimate_rank(static_cast<const SymOp&>(op));
}

int estimate_rank(const GraphSample& g) {
  GraphOp op(g);
  return estimate_rank(static_cast<const SymOp&>(op));
}

BlockEstimate spectral_block_estimate(const Embedding& emb,
                                      const std::vector<std::int32_t>& labels, int K,
                                      double rho) {
  const int n = static_cast<int>(labels.size());
  if (emb.U.rows() != n) throw Error("embedding and labels disagree on n");

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, emb.d);
  std::vector<int> sizes(K, 0);
  for (int i = 0; i < n; ++i) {
    G.row(labels[i]) += emb.U.row(i);
    ++sizes[labels[i]];
  }
  for (int k = 0; k < K; ++k)
    if (sizes[k] == 0) throw EmptyBlockError("empty block in spectral estimate");

  BlockEstimate est;
  est.raw = G * emb.lambda.asDiagonal() * G.transpose();
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l)
      est.raw(k, l) /= rho * static_cast<double>(sizes[k]) * static_cast<double>(sizes[l]);
  est.raw = 0.5 * (est.raw + est.raw.transpose()).eval();
  est.clamped = est.raw.cwiseMax(0.0).cwiseMin(1.0);
  return est;
}

BlockEstimate spectral_block_estimate(const Embedding& emb, const ClusterResult& clus,
                                      double rho) {
  return spectral_block_estimate(emb, clus.labels, static_cast<int>(clus.sizes.size()), rho);
}

Alignment align_blocks(const std::vector<std::int32_t>& tau_hat,
                       const std::vector<std::int32_t>& tau, int K) {
  if (tau_hat.size() != tau.size()) throw Error("label vectors differ in length");
  if (K > 10) throw Error("align_blocks supports K <= 10");
  const int n = static_cast<int>(tau.size());

  Eigen::MatrixXi C = Eigen::MatrixXi::Zero(K, K);
  for (int i = 0; i < n; ++i) ++C(tau_hat[i], tau[i]);

  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  long best_hits = -1;
  do {
    long hits = 0;
    for (int k = 0; k < K; ++k) hits += C(perm[k], k);
    if (hits > best_hits) {
      best_hits = hits;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Alignment a;
  a.psi = best;
  a.agreement = static_cast<double>(best_hits) / static_cast<double>(n);
  return a;
}

double two_to_infinity_residual(const Eigen::MatrixXd& U_hat, const Eigen::MatrixXd& U) {
  if (U_hat.rows() != U.rows() || U_hat.cols() != U.cols())
    throw Error("two_to_infinity_residual needs matching shapes");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U.transpose() * U_hat,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd W = svd.matrixU() * svd.matrixV().transpose();
  const Eigen::MatrixXd R = U_hat - U * W;
  return R.rowwise().norm().maxCoeff();
}

Embedding population_embedding(const ModelSpec& model, const std::vector<std::int32_t>& tau) {
  const int n = static_cast<int>(tau.size());
  std::vector<int> sizes(model.K, 0);
  for (int i = 0; i < n; ++i) ++sizes[tau[i]];
  for (int k = 0; k < model.K; ++k)
    if (sizes[k] == 0) throw EmptyBlockError("population embedding needs nonempty blocks");

  // P = S (rho B) S^T reduces to the K x K problem N (rho B) N with
  // N = diag(sqrt(n_k)); eigenvectors lift as U(i, c) = z(tau_i, c)/sqrt(n_tau_i).
  Eigen::VectorXd sq(model.K);
  for (int k = 0; k < model.K; ++k) sq[k] = std::sqrt(static_cast<double>(sizes[k]));
  const Eigen::MatrixXd M = sq.asDiagonal() * (model.rho * model.B) * sq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd w = es.eigenvalues();
  const std::vector<int> order = modulus_order(w);

  Embedding emb;
  emb.d = model.d;
  emb.U.resize(n, model.d);
  emb.lambda.resize(model.d);
  for (int c = 0; c < model.d; ++c) {
    const int r = order[c];
    emb.lambda[c] = w[r];
    for (int i = 0; i < n; ++i) emb.U(i, c) = es.eigenvectors()(tau[i], r) / sq[tau[i]];
  }
  fix_column_signs(emb.U);
  emb.modulus_tie =
      model.d < model.K &&
      std::abs(std::abs(w[order[model.d - 1]]) - std::abs(w[order[model.d]])) < kModulusTieTol;
  return emb;
}

}  // namespace sbmest
