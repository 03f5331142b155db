#ifndef SBMEST_MODEL_HPP
#define SBMEST_MODEL_HPP

#include <Eigen/Dense>

#include "sbmest/errors.hpp"

namespace sbmest {

/// Default relative tolerance for deciding which eigenvalues of B count
/// toward its rank.
inline constexpr double kRankTol = 1e-10;

/// A validated K-block model: symmetric B in [0,1]^{KxK}, block probabilities
/// pi on the simplex, sparsity factor rho in (0,1], and d = rank of B.
struct ModelSpec {
  Eigen::MatrixXd B;
  Eigen::VectorXd pi;
  double rho = 1.0;
  int K = 0;
  int d = 0;
};

/// Rows nu_1..nu_K of U|S|^{1/2} restricted to the d nonzero eigenvalues of
/// B = U S U^T, ordered by decreasing modulus with positive eigenvalues first.
/// B is recovered as nu * I_{p,q} * nu^T.
struct LatentPositions {
  Eigen::MatrixXd nu;       // K x d
  Eigen::VectorXd eigvals;  // the d retained eigenvalues of B, same order
  int p_sig = 0;            // positive eigenvalue count
  int q_sig = 0;            // negative eigenvalue count

  int dim() const { return static_cast<int>(nu.cols()); }
  /// Diagonal of I_{p,q} implied by the eigenvalue signs.
  Eigen::VectorXd signature() const {
    Eigen::VectorXd s(eigvals.size());
    for (Eigen::Index j = 0; j < eigvals.size(); ++j) s[j] = eigvals[j] >= 0 ? 1.0 : -1.0;
    return s;
  }
  Eigen::MatrixXd reconstruct() const {
    return nu * signature().asDiagonal() * nu.transpose();
  }
};

ModelSpec validate_model(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi, double rho,
                         double rank_tol = kRankTol);

LatentPositions latent_positions(const ModelSpec& model, double rank_tol = kRankTol);

/// Convenience constructors for the two parametrized families studied here.
/// Rank-1 two-block: B = [[p^2, pq], [pq, q^2]].
ModelSpec rank1_2block_model(double p, double q, double pi_p, double rho = 1.0);
/// Rank-2 three-block: B_ii = r_i^2, B_12 = r1 r2 cos(theta),
/// B_13 = r1 r3 cos(gamma), B_23 = r2 r3 cos(theta - gamma).
ModelSpec rank2_3block_model(double r1, double r2, double r3, double theta, double gamma,
                             const Eigen::Vector3d& pi, double rho = 1.0);

/// Fixes eigenvector sign so the first coordinate of magnitude above
/// 1e-9 * max|v| is positive. Makes decompositions deterministic.
void fix_column_signs(Eigen::MatrixXd& V);

}  // namespace sbmest

#endif
