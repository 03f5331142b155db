#ifndef SBMEST_LIKELIHOOD_HPP
#define SBMEST_LIKELIHOOD_HPP

#include <vector>

#include <Eigen/Dense>

#include "sbmest/sampling.hpp"

namespace sbmest {

/// Per-block-pair edge counts m_kl and pair counts, with n_kk = n_k(n_k+1)/2
/// (diagonal pairs included) and n_kl = n_k n_l for k < l. Stored symmetric.
struct SufficientStats {
  int K = 0;
  Eigen::MatrixXd m;
  Eigen::MatrixXd n_pairs;
};

SufficientStats binomial_counts(const GraphSample& g, int K);
/// Counts under alternative labels (e.g. recovered and aligned tau-hat).
SufficientStats binomial_counts(const GraphSample& g, const std::vector<std::int32_t>& labels,
                                int K);
SufficientStats binomial_counts(const Eigen::MatrixXd& A, const std::vector<std::int32_t>& tau,
                                int K);
/// Pair counts for given block sizes, m left at the binomial means
/// n_pairs_kl * rho * B_kl. Population-level stats for optimizer oracles.
SufficientStats population_counts(const ModelSpec& model, const std::vector<int>& sizes);

/// B_hat_kl = m_kl / (rho n_pairs_kl). May exceed 1 when rho < 1.
Eigen::MatrixXd naive_mle(const SufficientStats& stats, double rho);

struct RankMleResult {
  Eigen::VectorXd params;  // (p, q) or (r1, r2, r3, theta, gamma)
  Eigen::MatrixXd B_hat;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  bool boundary_hit = false;
};

/// Log-likelihood (binomial terms only, combinatorial constants dropped) and
/// its analytic gradient for the rank-1 two-block parametrization, with rho
/// folded into the success probabilities. grad may be null.
double rank1_loglik_2block(const SufficientStats& stats, double rho, double p, double q,
                           Eigen::Vector2d* grad);
/// Same for the rank-2 three-block parametrization x = (r1,r2,r3,theta,gamma).
double rank2_loglik_3block(const SufficientStats& stats, double rho,
                           const Eigen::Matrix<double, 5, 1>& x,
                           Eigen::Matrix<double, 5, 1>* grad);

/// B implied by the rank-2 parameters.
Eigen::Matrix3d rank2_3block_matrix(const Eigen::Matrix<double, 5, 1>& x);

RankMleResult rank1_mle_2block(const SufficientStats& stats, double rho,
                               const Eigen::Vector2d& init);
RankMleResult rank2_mle_3block(const SufficientStats& stats, double rho,
                               const Eigen::Matrix<double, 5, 1>& init);

/// Starting points derived from a block-probability estimate (typically the
/// clamped spectral estimate), clipped into the feasible box.
Eigen::Vector2d rank1_init_from_estimate(const Eigen::MatrixXd& B_hat);
Eigen::Matrix<double, 5, 1> rank2_init_from_estimate(const Eigen::MatrixXd& B_hat);

}  // namespace sbmest

#endif
