#ifndef SBMEST_SPECTRAL_HPP
#define SBMEST_SPECTRAL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sbmest/sampling.hpp"

namespace sbmest {

/// Read-only view of a symmetric operator, so the eigensolver can run on a
/// dense matrix or on a sampled graph without copying either.
class SymOp {
 public:
  virtual ~SymOp() = default;
  virtual int size() const = 0;
  virtual void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
  virtual double max_row_sum() const = 0;
};

class DenseOp final : public SymOp {
 public:
  explicit DenseOp(const Eigen::MatrixXd& A) : A_(A) {}
  int size() const override { return static_cast<int>(A_.rows()); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y.noalias() = A_ * x; }
  double max_row_sum() const override;

 private:
  const Eigen::MatrixXd& A_;
};

class GraphOp final : public SymOp {
 public:
  explicit GraphOp(const GraphSample& g) : g_(g) {}
  int size() const override { return g_.n; }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { g_.apply(x, y); }
  double max_row_sum() const override { return static_cast<double>(g_.max_degree()); }

 private:
  const GraphSample& g_;
};

/// Top-d eigenpairs of the adjacency matrix, by decreasing eigenvalue
/// modulus with positive values first on modulus ties. Columns carry the
/// first-nonzero-positive sign convention, so the embedding is deterministic.
struct Embedding {
  Eigen::MatrixXd U;       // n x d, orthonormal columns
  Eigen::VectorXd lambda;  // d eigenvalues
  int d = 0;
  bool modulus_tie = false;   // |lambda_d| - |lambda_{d+1}| < 1e-10
  double residual = 0.0;      // max_j ||A u_j - lambda_j u_j||
};

Embedding top_eigenpairs(const SymOp& A, int d);
Embedding top_eigenpairs(const Eigen::MatrixXd& A, int d);
Embedding top_eigenpairs(const GraphSample& g, int d);

/// Number of eigenvalues of A whose modulus strictly exceeds 4 sqrt(max degree).
int estimate_rank(const SymOp& A);
int estimate_rank(const Eigen::MatrixXd& A);
int estimate_rank(const GraphSample& g);
/// The threshold 4 sqrt(delta(A)) used by estimate_rank.
double rank_threshold(const SymOp& A);

struct ClusterResult {
  std::vector<std::int32_t> labels;  // 0-based, length n
  Eigen::MatrixXd centers;           // K x d
  std::vector<int> sizes;            // block sizes n_k
  double inertia = 0.0;
  bool empty_cluster_repaired = false;
};

/// K-means on the rows of the embedding: kmeans++ seeding, Lloyd iterations
/// to relative inertia change < 1e-8 (300 max), best of `restarts` by inertia.
ClusterResult cluster_embedding(const Embedding& emb, int K, std::uint64_t seed,
                                int restarts = 10);

/// s_k^T U Lambda U^T s_l / (n_k n_l rho). Raw values may leave [0,1]; the
/// clamped copy is for reporting only.
struct BlockEstimate {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd clamped;
};

BlockEstimate spectral_block_estimate(const Embedding& emb, const ClusterResult& clus,
                                      double rho);
BlockEstimate spectral_block_estimate(const Embedding& emb,
                                      const std::vector<std::int32_t>& labels, int K,
                                      double rho);

/// Permutation psi of [K] maximizing label agreement, found by optimal
/// assignment on the K x K confusion matrix. psi[k] is the estimated label
/// matching true block k.
struct Alignment {
  std::vector<int> psi;
  double agreement = 0.0;
};

Alignment align_blocks(const std::vector<std::int32_t>& tau_hat,
                       const std::vector<std::int32_t>& tau, int K);

/// max row norm of U_hat - U W, where W = W1 W2^T from the SVD
/// U^T U_hat = W1 S W2^T (orthogonal Procrustes alignment).
double two_to_infinity_residual(const Eigen::MatrixXd& U_hat, const Eigen::MatrixXd& U);

/// Eigenvectors of P = E[A] for given labels, computed exactly through the
/// K x K reduction; same ordering and sign conventions as top_eigenpairs.
Embedding population_embedding(const ModelSpec& model, const std::vector<std::int32_t>& tau);

}  // namespace sbmest

#endif
