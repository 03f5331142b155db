#ifndef SBMEST_SAMPLING_HPP
#define SBMEST_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sbmest/model.hpp"

namespace sbmest {

/// A sampled graph. The adjacency matrix is symmetric 0/1 with self-loops
/// permitted; it is stored as sorted per-row neighbor lists (CSR) so that
/// dense and sparse regimes share one representation. Block labels are
/// 0-based internally (1-based in files).
struct GraphSample {
  int n = 0;
  std::vector<std::int32_t> tau;
  std::vector<std::int64_t> row_begin;  // size n+1
  std::vector<std::int32_t> neighbors;  // concatenated sorted rows
  std::uint64_t seed = 0;
  /// When sampled from a model, P_ij = rho * B[tau_i][tau_j] is available.
  std::optional<ModelSpec> expected;

  bool adjacent(int i, int j) const;
  std::int64_t degree(int i) const { return row_begin[i + 1] - row_begin[i]; }
  std::int64_t max_degree() const;
  /// Number of unordered adjacent pairs {i,j}, i<=j, including self-loops.
  std::int64_t edge_pairs() const;
  std::vector<int> block_sizes(int K) const;

  Eigen::MatrixXd dense_adjacency() const;
  Eigen::MatrixXd dense_expected() const;  // requires `expected`

  /// y = A x.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
};

/// i.i.d. block labels with Pr[tau_i = k] = pi_k; deterministic given seed.
std::vector<std::int32_t> sample_assignments(const ModelSpec& model, int n, std::uint64_t seed);

/// Deterministic labels with block sizes n_k ~= n pi_k (largest remainder),
/// sorted by block. The fixed-size path used by the worked examples.
std::vector<std::int32_t> proportional_assignments(const ModelSpec& model, int n);

/// Samples A_ij ~ Bernoulli(rho B_{tau_i tau_j}) independently over i <= j
/// (diagonal included) and mirrors the lower triangle.
GraphSample sample_adjacency(const ModelSpec& model, const std::vector<std::int32_t>& tau,
                             std::uint64_t seed);

/// P with P_ij = rho B_{tau_i tau_j}.
Eigen::MatrixXd expected_matrix(const ModelSpec& model, const std::vector<std::int32_t>& tau);

}  // namespace sbmest

#endif
