#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sips/exact.hpp"
#include "sips/random.hpp"

namespace sips {

namespace {

struct Neighbor {
  int node;
  double rate;
};

// Sparse view of the network: who acts on node i, and whom node j acts on.
struct Lists {
  std::vector<std::vector<Neighbor>> beta_in, delta1_in, delta2_in;
  std::vector<std::vector<int>> affects;
  Eigen::VectorXd gamma, alpha;

  explicit Lists(const RateNetwork& net)
      : beta_in(net.n), delta1_in(net.n), delta2_in(net.n), affects(net.n),
        gamma(net.gamma), alpha(net.alpha) {
    for (int i = 0; i < net.n; ++i)
      for (int j = 0; j < net.n; ++j) {
        if (net.beta(i, j) > 0.0) beta_in[i].push_back({j, net.beta(i, j)});
        if (net.delta1(i, j) > 0.0) delta1_in[i].push_back({j, net.delta1(i, j)});
        if (net.delta2(i, j) > 0.0) delta2_in[i].push_back({j, net.delta2(i, j)});
        if (i != j && (net.beta(i, j) > 0.0 || net.delta1(i, j) > 0.0 || net.delta2(i, j) > 0.0))
          affects[j].push_back(i);
      }
  }
};

class PathSimulator {
 public:
  PathSimulator(const Lists& lists, int n, const std::vector<double>& grid)
      : lists_(lists), n_(n), grid_(grid), digits_(n), rates_(n) {}

  // Runs one path and adds its grid indicators to the counters.
  std::uint64_t run(const ChainState& x0, double horizon, Engine& rng,
                    std::vector<std::uint32_t>& infected_counts,
                    std::vector<std::uint32_t>& patched_counts) {
    digits_ = x0.digits;
    for (int i = 0; i < n_; ++i) refresh(i);

    std::size_t next_point = 0;
    const auto record_until = [&](double t_excl) {
      while (next_point < grid_.size() && grid_[next_point] < t_excl) {
        const std::size_t base = next_point * static_cast<std::size_t>(n_);
        for (int i = 0; i < n_; ++i) {
          infected_counts[base + i] += digits_[i] == kInfected;
          patched_counts[base + i] += digits_[i] == kPatched;
        }
        ++next_point;
      }
    };

    double t = 0.0;
    std::uint64_t events = 0;
    for (;;) {
      double total = 0.0;
      for (const auto& r : rates_) total += r.total();
      if (!(total > 0.0)) break;  // absorbing state

      const double wait = -std::log1p(-uniform01(rng)) / total;
      const double t_next = t + wait;
      if (t_next > horizon) break;
      record_until(t_next);

      const int node = pick_node(uniform01(rng) * total);
      const auto& r = rates_[node];
      const double u = uniform01(rng) * r.total();
      std::uint8_t target;
      switch (digits_[node]) {
        case kSusceptible: target = u < r.to_infected ? kInfected : kPatched; break;
        case kInfected: target = u < r.to_susceptible ? kSusceptible : kPatched; break;
        default: target = kSusceptible; break;
      }
      digits_[node] = target;
      refresh(node);
      for (int other : lists_.affects[node]) refresh(other);
      t = t_next;
      ++events;
    }
    record_until(INFINITY);
    return events;
  }

 private:
  void refresh(int i) {
    NodeRates r;
    switch (digits_[i]) {
      case kSusceptible:
        for (const auto& [j, rate] : lists_.beta_in[i])
          if (digits_[j] == kInfected) r.to_infected += rate;
        for (const auto& [j, rate] : lists_.delta1_in[i])
          if (digits_[j] == kPatched) r.to_patched += rate;
        break;
      case kInfected:
        r.to_susceptible = lists_.gamma[i];
        for (const auto& [j, rate] : lists_.delta2_in[i])
          if (digits_[j] == kPatched) r.to_patched += rate;
        break;
      case kPatched:
        r.to_susceptible = lists_.alpha[i];
        break;
    }
    rates_[i] = r;
  }

  int pick_node(double target) const {
    double cumulative = 0.0;
    int last_active = -1;
    for (int i = 0; i < n_; ++i) {
      const double rate = rates_[i].total();
      if (rate <= 0.0) continue;
      cumulative += rate;
      last_active = i;
      if (target < cumulative) return i;
    }
    return last_active;  // target fell past the sum through rounding
  }

  const Lists& lists_;
  int n_;
  const std::vector<double>& grid_;
  std::vector<std::uint8_t> digits_;
  std::vector<NodeRates> rates_;
};

}  // namespace

SampledTrajectory gillespie(const RateNetwork& net, const ChainState& x0, double horizon,
                            const GillespieOptions& opts) {
  require_valid(net, {opts.allow_reducible});
  if (opts.paths < 1) throw std::invalid_argument("gillespie: need at least one path");
  if (!(horizon > 0.0)) throw std::invalid_argument("gillespie: horizon must be positive");
  if (x0.nodes() != net.n) throw std::invalid_argument("gillespie: initial state has wrong size");
  for (auto d : x0.digits)
    if (d > kPatched) throw std::invalid_argument("gillespie: invalid node state in x0");

  const Lists lists(net);
  const auto grid = uniform_grid(horizon, opts.grid_points);
  const std::size_t cells = grid.size() * static_cast<std::size_t>(net.n);

  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, opts.paths);

  struct Partial {
    std::vector<std::uint32_t> infected, patched;
    std::uint64_t events = 0;
  };
  std::vector<Partial> partials(threads);

  const auto work = [&](int worker) {
    auto& part = partials[worker];
    part.infected.assign(cells, 0);
    part.patched.assign(cells, 0);
    PathSimulator sim(lists, net.n, grid);
    const long begin = static_cast<long>(opts.paths) * worker / threads;
    const long end = static_cast<long>(opts.paths) * (worker + 1) / threads;
    for (long p = begin; p < end; ++p) {
      Engine rng(derive_seed(opts.seed, static_cast<std::uint64_t>(p)));
      part.events += sim.run(x0, horizon, rng, part.infected, part.patched);
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  SampledTrajectory out;
  out.paths = opts.paths;
  out.seed = opts.seed;
  out.average.resize(net.n, grid.size());
  out.average.times = grid;
  std::vector<std::uint64_t> inf(cells, 0), pat(cells, 0);
  for (const auto& part : partials) {
    for (std::size_t c = 0; c < cells; ++c) {
      inf[c] += part.infected[c];
      pat[c] += part.patched[c];
    }
    out.events += part.events;
  }
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int i = 0; i < net.n; ++i) {
      const std::size_t c = k * static_cast<std::size_t>(net.n) + i;
      out.average.infected(i, static_cast<Eigen::Index>(k)) = static_cast<double>(inf[c]) / opts.paths;
      out.average.patched(i, static_cast<Eigen::Index>(k)) = static_cast<double>(pat[c]) / opts.paths;
    }
  return out;
}

}  // namespace sips
