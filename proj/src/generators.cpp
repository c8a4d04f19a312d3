#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "sips/errors.hpp"
#include "sips/graph.hpp"
#include "sips/network.hpp"
#include "sips/random.hpp"

namespace sips {

namespace {

void check_range(const char* name, const Range& r, bool strictly_positive) {
  const std::string what = std::string("rate range ") + name;
  if (!(r.min >= 0.0) || !(r.max >= 0.0)) throw std::invalid_argument(what + " has a negative bound");
  if (r.min > r.max) throw std::invalid_argument(what + " has min > max");
  if (strictly_positive && !(r.min > 0.0))
    throw std::invalid_argument(what + " must be strictly positive");
  if (!(r.max > 0.0)) throw std::invalid_argument(what + " is identically zero");
}

bool connected(int n, const std::set<std::pair<int, int>>& edges) {
  Digraph g(n);
  for (auto [u, v] : edges) {
    g[u].push_back(v);
    g[v].push_back(u);
  }
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

// Positive draw from [min, max]; an exact zero would break the support invariants.
double draw_positive(Engine& rng, const Range& r) {
  double v;
  do {
    v = uniform(rng, r.min, r.max);
  } while (!(v > 0.0));
  return v;
}

}  // namespace

void RateRanges::check() const {
  check_range("beta", beta, false);
  check_range("delta1", delta1, false);
  check_range("delta2", delta2, false);
  check_range("gamma", gamma, true);
  check_range("alpha", alpha, true);
}

std::vector<int> Topology::degrees() const {
  std::vector<int> deg(n, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Topology scale_free_topology(int n, int attach, std::uint64_t seed) {
  if (attach < 1 || n < attach)
    throw std::invalid_argument("scale-free generator requires n >= attach >= 1");
  Engine rng(seed);
  std::set<std::pair<int, int>> edges;
  // Every endpoint appears once per incident edge: sampling from it is degree-proportional.
  std::vector<int> endpoints;

  const int core = std::min(n, attach + 1);
  for (int u = 0; u < core; ++u)
    for (int v = u + 1; v < core; ++v) {
      edges.emplace(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }

  std::vector<int> targets;
  for (int v = core; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < attach) {
      const int t = endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      edges.emplace(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return {n, {edges.begin(), edges.end()}};
}

Topology small_world_topology(int n, int k, double rewire_p, std::uint64_t seed) {
  if (k < 2 || k % 2 != 0 || n <= k)
    throw std::invalid_argument("small-world generator requires n > k >= 2 with k even");
  if (!(rewire_p >= 0.0 && rewire_p <= 1.0))
    throw std::invalid_argument("small-world rewiring probability must lie in [0, 1]");

  constexpr int kMaxPasses = 100;
  Engine rng(seed);
  const auto key = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };

  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 1; j <= k / 2; ++j) edges.insert(key(i, (i + j) % n));

    for (int j = 1; j <= k / 2; ++j)
      for (int i = 0; i < n; ++i) {
        if (uniform01(rng) >= rewire_p) continue;
        const auto old_edge = key(i, (i + j) % n);
        if (!edges.count(old_edge)) continue;  // already rewired away from the other end
        int degree_i = 0;
        for (auto [u, v] : edges) degree_i += (u == i || v == i);
        if (degree_i >= n - 1) continue;
        int w;
        do {
          w = static_cast<int>(uniform_index(rng, n));
        } while (w == i || edges.count(key(i, w)));
        edges.erase(old_edge);
        edges.insert(key(i, w));
      }

    if (connected(n, edges)) return {n, {edges.begin(), edges.end()}};
  }
  throw Error("small-world generator: no connected rewiring within " +
              std::to_string(kMaxPasses) + " passes");
}

RateNetwork assign_rates(const Topology& virus_layer, const Topology& patch_layer,
                         const RateRanges& ranges, std::uint64_t seed) {
  ranges.check();
  if (virus_layer.n != patch_layer.n) throw std::invalid_argument("layer sizes differ");
  Engine rng(seed);
  auto net = RateNetwork::zeros(virus_layer.n);

  for (auto [u, v] : virus_layer.edges) {
    net.beta(u, v) = draw_positive(rng, ranges.beta);
    net.beta(v, u) = draw_positive(rng, ranges.beta);
  }
  for (auto [u, v] : patch_layer.edges) {
    net.delta1(u, v) = draw_positive(rng, ranges.delta1);
    net.delta1(v, u) = draw_positive(rng, ranges.delta1);
    net.delta2(u, v) = draw_positive(rng, ranges.delta2);
    net.delta2(v, u) = draw_positive(rng, ranges.delta2);
  }
  for (int i = 0; i < net.n; ++i) {
    net.gamma[i] = draw_positive(rng, ranges.gamma);
    net.alpha[i] = draw_positive(rng, ranges.alpha);
  }
  return net;
}

RateNetwork generate_scale_free(int n, int attach, const RateRanges& ranges, std::uint64_t seed,
                                const GenerateOptions& opts) {
  ranges.check();
  const auto virus = scale_free_topology(n, attach, derive_seed(seed, 0));
  const auto patch = opts.shared_topology ? virus : scale_free_topology(n, attach, derive_seed(seed, 1));
  return assign_rates(virus, patch, ranges, derive_seed(seed, 2));
}

RateNetwork generate_small_world(int n, int k, double rewire_p, const RateRanges& ranges,
                                 std::uint64_t seed, const GenerateOptions& opts) {
  ranges.check();
  const auto virus = small_world_topology(n, k, rewire_p, derive_seed(seed, 0));
  const auto patch =
      opts.shared_topology ? virus : small_world_topology(n, k, rewire_p, derive_seed(seed, 1));
  return assign_rates(virus, patch, ranges, derive_seed(seed, 2));
}

}  // namespace sips
