#include "sbmest/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sbmest/errors.hpp"

namespace sbmest {

void write_edge_list(const GraphSample& g, int K, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << g.n << ' ' << K << ' ' << g.seed << '\n';
  for (int i = 0; i < g.n; ++i)
    for (std::int64_t t = g.row_begin[i]; t < g.row_begin[i + 1]; ++t) {
      const int j = g.neighbors[t];
      if (j >= i) out << i + 1 << ' ' << j + 1 << '\n';
    }
  if (!out) throw IoError("write failed for " + path);
}

void write_labels(const std::vector<std::int32_t>& tau, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::int32_t t : tau) out << t + 1 << '\n';
  if (!out) throw IoError("write failed for " + path);
}

LoadedGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  LoadedGraph lg;
  std::uint64_t seed = 0;
  int n = 0, K = 0;
  if (!(in >> n >> K >> seed)) throw IoError("bad header in " + path);
  if (n < 1 || K < 1) throw IoError("bad header values in " + path);

  std::vector<std::vector<std::int32_t>> rows(n);
  int i, j;
  while (in >> i >> j) {
    if (i < 1 || j < 1 || i > n || j > n) throw IoError("edge endpoint out of range in " + path);
    --i;
    --j;
    rows[i].push_back(j);
    if (i != j) rows[j].push_back(i);
  }
  GraphSample& g = lg.graph;
  g.n = n;
  g.seed = seed;
  g.row_begin.resize(n + 1);
  std::int64_t total = 0;
  for (int r = 0; r < n; ++r) {
    std::sort(rows[r].begin(), rows[r].end());
    rows[r].erase(std::unique(rows[r].begin(), rows[r].end()), rows[r].end());
    g.row_begin[r] = total;
    total += static_cast<std::int64_t>(rows[r].size());
  }
  g.row_begin[n] = total;
  g.neighbors.resize(total);
  for (int r = 0; r < n; ++r)
    std::copy(rows[r].begin(), rows[r].end(), g.neighbors.begin() + g.row_begin[r]);
  lg.K = K;
  return lg;
}

std::vector<std::int32_t> read_labels(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::int32_t> tau;
  tau.reserve(n);
  int v;
  while (in >> v) tau.push_back(v - 1);
  if (static_cast<int>(tau.size()) != n)
    throw IoError("label file has " + std::to_string(tau.size()) + " entries, expected " +
                  std::to_string(n));
  return tau;
}

void write_dense_csv(const Eigen::MatrixXd& A, const std::string& path) {
  if (A.rows() > 5000) throw IoError("dense CSV export restricted to n <= 5000");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << A(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace sbmest
