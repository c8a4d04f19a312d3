#include "sips/graph.hpp"

#include <algorithm>
#include <queue>

namespace sips {

Digraph support_digraph(const Eigen::MatrixXd& rates) {
  const auto n = static_cast<int>(rates.rows());
  Digraph graph(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && rates(i, j) > 0.0) graph[j].push_back(i);
  return graph;
}

Components strongly_connected_components(const Digraph& graph) {
  const auto n = static_cast<int>(graph.size());
  Components out;
  out.label.assign(n, -1);

  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  // (node, next edge position) frames replace recursion.
  std::vector<std::pair<int, std::size_t>> frames;
  int counter = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < graph[v].size()) {
        const int w = graph[v][pos++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const int done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          out.label[w] = out.count;
        } while (w != done);
        ++out.count;
      }
    }
  }
  return out;
}

bool is_strongly_connected(const Digraph& graph) {
  if (graph.empty()) return false;
  return strongly_connected_components(graph).count == 1;
}

std::vector<int> bfs_distances(const Digraph& graph, int source) {
  std::vector<int> dist(graph.size(), -1);
  std::queue<int> queue;
  dist[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int w : graph[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push(w);
      }
  }
  return dist;
}

}  // namespace sips
