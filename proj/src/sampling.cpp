#include "sbmest/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "sbmest/errors.hpp"
#include "sbmest/rng.hpp"

namespace sbmest {

bool GraphSample::adjacent(int i, int j) const {
  const auto first = neighbors.begin() + row_begin[i];
  const auto last = neighbors.begin() + row_begin[i + 1];
  return std::binary_search(first, last, j);
}

std::int64_t GraphSample::max_degree() const {
  std::int64_t best = 0;
  for (int i = 0; i < n; ++i) best = std::max(best, degree(i));
  return best;
}

std::int64_t GraphSample::edge_pairs() const {
  std::int64_t loops = 0;
  for (int i = 0; i < n; ++i)
    if (adjacent(i, i)) ++loops;
  return (static_cast<std::int64_t>(neighbors.size()) + loops) / 2;
}

std::vector<int> GraphSample::block_sizes(int K) const {
  std::vector<int> sizes(K, 0);
  for (int i = 0; i < n; ++i) ++sizes[tau[i]];
  return sizes;
}

Eigen::MatrixXd GraphSample::dense_adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (std::int64_t t = row_begin[i]; t < row_begin[i + 1]; ++t) A(i, neighbors[t]) = 1.0;
  return A;
}

Eigen::MatrixXd GraphSample::dense_expected() const {
  if (!expected) throw Error("GraphSample has no expected-value model attached");
  return expected_matrix(*expected, tau);
}

void GraphSample::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::int64_t t = row_begin[i]; t < row_begin[i + 1]; ++t) acc += x[neighbors[t]];
    y[i] = acc;
  }
}

std::vector<std::int32_t> sample_assignments(const ModelSpec& model, int n, std::uint64_t seed) {
  if (n < 1) throw OutOfRangeError("n must be at least 1");
  Rng rng(seed);
  std::vector<double> cum(model.K);
  double acc = 0.0;
  for (int k = 0; k < model.K; ++k) {
    acc += model.pi[k];
    cum[k] = acc;
  }
  cum.back() = 1.0;
  std::vector<std::int32_t> tau(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    tau[i] = static_cast<std::int32_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  }
  return tau;
}

std::vector<std::int32_t> proportional_assignments(const ModelSpec& model, int n) {
  if (n < 1) throw OutOfRangeError("n must be at least 1");
  // largest-remainder rounding of n pi_k
  std::vector<int> sizes(model.K);
  std::vector<std::pair<double, int>> rem(model.K);
  int assigned = 0;
  for (int k = 0; k < model.K; ++k) {
    const double exact = n * model.pi[k];
    sizes[k] = static_cast<int>(std::floor(exact));
    rem[k] = {exact - sizes[k], k};
    assigned += sizes[k];
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int t = 0; assigned < n; ++t, ++assigned) ++sizes[rem[t % model.K].second];

  std::vector<std::int32_t> tau;
  tau.reserve(n);
  for (int k = 0; k < model.K; ++k) tau.insert(tau.end(), sizes[k], k);
  return tau;
}

GraphSample sample_adjacency(const ModelSpec& model, const std::vector<std::int32_t>& tau,
                             std::uint64_t seed) {
  const int n = static_cast<int>(tau.size());
  for (int i = 0; i < n; ++i)
    if (tau[i] < 0 || tau[i] >= model.K) throw OutOfRangeError("tau label outside [K]");

  Rng rng(seed);
  std::vector<std::vector<std::int32_t>> rows(n);
  const double avg = model.rho * model.B.mean();
  for (auto& r : rows) r.reserve(static_cast<std::size_t>(avg * n * 1.2) + 4);

  for (int i = 0; i < n; ++i) {
    const auto* Bi = model.B.data();
    for (int j = i; j < n; ++j) {
      const double pij = model.rho * Bi[tau[i] + tau[j] * model.K];
      if (pij > 0.0 && rng.next_double() < pij) {
        rows[i].push_back(j);
        if (j != i) rows[j].push_back(i);
      }
    }
  }

  GraphSample g;
  g.n = n;
  g.tau = tau;
  g.seed = seed;
  g.expected = model;
  g.row_begin.resize(n + 1);
  std::int64_t total = 0;
  for (int i = 0; i < n; ++i) {
    g.row_begin[i] = total;
    total += static_cast<std::int64_t>(rows[i].size());
  }
  g.row_begin[n] = total;
  g.neighbors.resize(total);
  for (int i = 0; i < n; ++i)
    std::copy(rows[i].begin(), rows[i].end(), g.neighbors.begin() + g.row_begin[i]);
  return g;
}

Eigen::MatrixXd expected_matrix(const ModelSpec& model, const std::vector<std::int32_t>& tau) {
  const int n = static_cast<int>(tau.size());
  for (int i = 0; i < n; ++i)
    if (tau[i] < 0 || tau[i] >= model.K) throw OutOfRangeError("tau label outside [K]");
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = model.rho * model.B(tau[i], tau[j]);
  return P;
}

}  // namespace sbmest
