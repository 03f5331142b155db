#ifndef SBMEST_ASYMPTOTIC_HPP
#define SBMEST_ASYMPTOTIC_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sbmest/model.hpp"

namespace sbmest {

enum class Regime { dense, sparse };

/// The sparse-regime variance formulas admit two readings: the theorem
/// statement squares the (1/pi_k - 2 zeta_kk) factors, while the variance
/// decomposition in the derivation (and the full-rank corollary it must
/// reduce to) leaves them unsquared. Both are implemented; Monte Carlo in the
/// sparse regime discriminates, and corollary_consistent is what it favors.
enum class SparseVariant { as_printed, corollary_consistent };

/// Delta = sum_k pi_k nu_k nu_k^T and zeta_kl = nu_k^T Delta^{-1} nu_l.
/// Throws SingularDeltaError past condition number 1e12.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> delta_and_zeta(const Eigen::VectorXd& pi,
                                                           const Eigen::MatrixXd& nu);
/// Condition number report for the gate above.
double delta_condition(const Eigen::VectorXd& pi, const Eigen::MatrixXd& nu);

/// Asymptotic bias of the spectral block estimator, dense regime (rho = 1).
Eigen::MatrixXd theta_dense(const ModelSpec& model, const LatentPositions& lp);
/// Sparse regime: same with every (1 - B) factor dropped.
Eigen::MatrixXd theta_sparse(const ModelSpec& model, const LatentPositions& lp);

/// Asymptotic variances of n (B_hat^(S) - B), dense regime.
Eigen::MatrixXd sigma_dense(const ModelSpec& model, const LatentPositions& lp);
/// Asymptotic variances of n sqrt(rho) (B_hat^(S) - B), sparse regime.
Eigen::MatrixXd sigma_sparse(const ModelSpec& model, const LatentPositions& lp,
                             SparseVariant variant = SparseVariant::corollary_consistent);

/// Limiting variances of the naive block-frequency estimator:
/// diag 2 B_kk (1-B_kk) / pi_k^2, off-diag B_kl (1-B_kl) / (pi_k pi_l);
/// sparse regime drops the (1-B) factors.
Eigen::MatrixXd naive_variance(const ModelSpec& model, Regime regime);

/// theta evaluated on estimated quantities (pi_hat, nu_hat and the block
/// matrix they imply), as used for bias correction from a single graph.
/// `signature` carries the +-1 diagonal of I_{p,q} implied by the embedding.
Eigen::MatrixXd plug_in_theta(const Eigen::MatrixXd& B_hat, const Eigen::VectorXd& pi_hat,
                              const Eigen::MatrixXd& nu_hat, const Eigen::VectorXd& signature,
                              Regime regime);

/// Everything the CLT reports need, for one model and regime.
struct AsymptoticSummary {
  Regime regime = Regime::dense;
  Eigen::MatrixXd Delta;
  Eigen::MatrixXd zeta;
  Eigen::MatrixXd theta;       // theta or theta-tilde per regime
  Eigen::MatrixXd sigma2;      // sigma^2 or sigma-tilde^2 per regime
  Eigen::MatrixXd sigma2_printed;  // sparse only: the as_printed variant
  Eigen::MatrixXd naive_var;
  double delta_cond = 0.0;
};

AsymptoticSummary asymptotic_summary(const ModelSpec& model, Regime regime);

/// Fisher information of the low-rank parameters in the n^2-pair limit,
/// the Jacobian J of vech(B), and the MLE covariance J I^{-1} J^T.
struct FisherBundle {
  Eigen::MatrixXd info;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd mle_cov;
};

FisherBundle fisher_info_2block(double p, double q, double pi_p);
FisherBundle fisher_info_3block(double r1, double r2, double r3, double theta, double gamma,
                                const Eigen::Vector3d& pi);

/// One grid point of an MSE-ratio surface. mse_S is the sum of spectral
/// variances (bias-corrected estimator), mse_N the sum of naive variances,
/// mse_M the trace of the MLE covariance over vech(B).
struct MsePoint {
  double a = 0.0, b = 0.0;  // grid coordinates (p,q) or (r2,theta)
  double mse_S = 0.0, mse_N = 0.0, mse_M = 0.0;
  bool feasible = true;
};

std::vector<MsePoint> mse_surface_2block(int grid_a, int grid_b, double lo, double hi,
                                         double pi_p);
/// The fixed slice pi uniform, r3 and gamma given, r1 = 1 - r2; grid over
/// r2 in [r2_lo, r2_hi] and theta in [th_lo, th_hi].
std::vector<MsePoint> mse_surface_3block(int grid_a, int grid_b, double r2_lo, double r2_hi,
                                         double th_lo, double th_hi, double r3, double gamma);
/// Single explicit model: mse_M is defined (equal to mse_N) only at full rank.
MsePoint mse_point_explicit(const ModelSpec& model);

}  // namespace sbmest

#endif
