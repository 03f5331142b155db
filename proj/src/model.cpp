#include "sbmest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace sbmest {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kSimplexTol = 1e-12;

// Eigenvalue order: decreasing modulus, positive first on modulus ties,
// original index last.
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

}  // namespace

void fix_column_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    const double big = V.col(j).cwiseAbs().maxCoeff();
    if (big == 0.0) continue;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      if (std::abs(V(i, j)) > 1e-9 * big) {
        if (V(i, j) < 0) V.col(j) = -V.col(j);
        break;
      }
    }
  }
}

ModelSpec validate_model(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi, double rho,
                         double rank_tol) {
  if (B.rows() != B.cols()) throw NonSymmetricError("B is not square");
  const int K = static_cast<int>(B.rows());
  if (K < 1) throw OutOfRangeError("B is empty");
  if (pi.size() != K) throw BadSimplexError("pi dimension does not match B");

  for (int i = 0; i < K; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(B(i, j) - B(j, i)) > kSymTol)
        throw NonSymmetricError("B is asymmetric beyond tolerance");

  if (!(rho > 0.0) || rho > 1.0) throw OutOfRangeError("rho must lie in (0, 1]");
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      if (B(i, j) < 0.0 || B(i, j) > 1.0)
        throw OutOfRangeError("B entries must lie in [0, 1]");
      if (rho * B(i, j) > 1.0) throw OutOfRangeError("rho * B leaves [0, 1]");
    }

  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    if (!(pi[k] > 0.0)) throw BadSimplexError("pi entries must be positive");
    sum += pi[k];
  }
  if (std::abs(sum - 1.0) > kSimplexTol) throw BadSimplexError("pi does not sum to 1");

  // Symmetrize exactly, averaging away sub-tolerance asymmetry.
  ModelSpec model;
  model.B = 0.5 * (B + B.transpose());
  model.pi = pi;
  model.rho = rho;
  model.K = K;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.B, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd w = es.eigenvalues();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  const double cutoff = rank_tol * scale;
  int d = 0;
  for (int k = 0; k < K; ++k)
    if (std::abs(w[k]) > cutoff) ++d;
  model.d = std::max(d, 0);
  if (model.d < 1) throw OutOfRangeError("B has rank 0 under the rank tolerance");
  return model;
}

LatentPositions latent_positions(const ModelSpec& model, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.B);
  const Eigen::VectorXd w = es.eigenvalues();
  Eigen::MatrixXd V = es.eigenvectors();
  fix_column_signs(V);

  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  const double cutoff = rank_tol * scale;
  for (int k = 0; k < model.K; ++k)
    if (std::abs(std::abs(w[k]) - cutoff) <= rank_tol * scale)
      throw RankDeficiencyAmbiguousError("eigenvalue modulus within tolerance of the rank cutoff");

  const std::vector<int> order = modulus_order(w);
  LatentPositions lp;
  lp.nu.resize(model.K, model.d);
  lp.eigvals.resize(model.d);
  int col = 0;
  for (int r : order) {
    if (std::abs(w[r]) <= cutoff) continue;
    lp.eigvals[col] = w[r];
    lp.nu.col(col) = V.col(r) * std::sqrt(std::abs(w[r]));
    if (w[r] > 0)
      ++lp.p_sig;
    else
      ++lp.q_sig;
    ++col;
  }
  return lp;
}

ModelSpec rank1_2block_model(double p, double q, double pi_p, double rho) {
  Eigen::MatrixXd B(2, 2);
  B << p * p, p * q, p * q, q * q;
  Eigen::VectorXd pi(2);
  pi << pi_p, 1.0 - pi_p;
  return validate_model(B, pi, rho);
}

ModelSpec rank2_3block_model(double r1, double r2, double r3, double theta, double gamma,
                             const Eigen::Vector3d& pi, double rho) {
  Eigen::MatrixXd B(3, 3);
  B << r1 * r1, r1 * r2 * std::cos(theta), r1 * r3 * std::cos(gamma),
      r1 * r2 * std::cos(theta), r2 * r2, r2 * r3 * std::cos(theta - gamma),
      r1 * r3 * std::cos(gamma), r2 * r3 * std::cos(theta - gamma), r3 * r3;
  return validate_model(B, pi, rho);
}

}  // namespace sbmest
