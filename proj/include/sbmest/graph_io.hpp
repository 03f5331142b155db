#ifndef SBMEST_GRAPH_IO_HPP
#define SBMEST_GRAPH_IO_HPP

#include <string>

#include "sbmest/sampling.hpp"

namespace sbmest {

/// Edge-list format: header line "n K seed", then one "i j" pair per line
/// (1-based, i <= j, self-loops included). Labels sidecar: one 1-based block
/// label per line.
void write_edge_list(const GraphSample& g, int K, const std::string& path);
void write_labels(const std::vector<std::int32_t>& tau, const std::string& path);

struct LoadedGraph {
  GraphSample graph;  // tau empty unless labels were loaded
  int K = 0;
};

LoadedGraph read_edge_list(const std::string& path);
std::vector<std::int32_t> read_labels(const std::string& path, int n);

/// Dense CSV (one row per line, comma separated); refuses n > 5000.
void write_dense_csv(const Eigen::MatrixXd& A, const std::string& path);

}  // namespace sbmest

#endif
