#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sips {

/// Adjacency-list digraph on nodes 0..n-1.
using Digraph = std::vector<std::vector<int>>;

/// Support digraph of a rate matrix: edge j -> i iff rates(i, j) > 0, i != j.
/// This is the orientation of G_v / G_p (node j acts on node i).
Digraph support_digraph(const Eigen::MatrixXd& rates);

struct Components {
  std::vector<int> label;  // component id per node
  int count = 0;
};

/// Strongly connected components (iterative Tarjan), linear in nodes + edges.
/// Component ids come out in reverse topological order of the condensation.
Components strongly_connected_components(const Digraph& graph);

bool is_strongly_connected(const Digraph& graph);

/// Irreducibility of a square matrix: off-diagonal support strongly connected.
inline bool is_irreducible(const Eigen::MatrixXd& m) {
  return is_strongly_connected(support_digraph(m));
}

/// Hop distances from `source`; unreachable nodes get -1.
std::vector<int> bfs_distances(const Digraph& graph, int source);

}  // namespace sips
