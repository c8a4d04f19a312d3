#include <cmath>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "sips/errors.hpp"
#include "sips/exact.hpp"
#include "sips/rk4.hpp"

namespace sips {

std::uint64_t state_count(int n) {
  std::uint64_t count = 1;
  for (int k = 0; k < n; ++k) count *= 3;
  return count;
}

std::uint64_t ChainState::index() const {
  std::uint64_t idx = 0;
  for (int k = nodes() - 1; k >= 0; --k) idx = idx * 3 + digits[k];
  return idx;
}

ChainState ChainState::from_index(std::uint64_t index, int n) {
  if (index >= state_count(n)) throw std::out_of_range("chain state index out of range");
  ChainState s{std::vector<std::uint8_t>(n)};
  for (int k = 0; k < n; ++k) {
    s.digits[k] = static_cast<std::uint8_t>(index % 3);
    index /= 3;
  }
  return s;
}

ChainState parse_init(const std::string& spec, int n) {
  auto state = ChainState::susceptible(n);
  std::stringstream ss(spec);
  std::string item;
  int column = 1;
  while (std::getline(ss, item, ',')) {
    const auto raw_size = item.size();
    std::erase_if(item, [](unsigned char c) { return std::isspace(c); });
    if (item.empty() && raw_size > 0)
      throw ParseError("empty item in initial state", 1, column);
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0)
      throw ParseError("expected i:<node> or p:<node> in '" + item + "'", 1, column);
    const std::string kind = item.substr(0, colon);
    const std::string id = item.substr(colon + 1);
    std::uint8_t digit;
    if (kind == "i") digit = kInfected;
    else if (kind == "p") digit = kPatched;
    else throw ParseError("unknown state '" + kind + "' (use i or p)", 1, column);
    std::size_t used = 0;
    long node = -1;
    try {
      node = std::stol(id, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != id.size() || id.empty())
      throw ParseError("bad node id '" + id + "'", 1, column + static_cast<int>(colon) + 1);
    if (node < 0 || node >= n) throw ParseError("node id " + id + " out of range", 1, column);
    if (state.digits[node] != kSusceptible && state.digits[node] != digit)
      throw ParseError("node " + id + " assigned two states", 1, column);
    state.digits[node] = digit;
    column += static_cast<int>(raw_size) + 1;
  }
  return state;
}

NodeRates node_rates(const RateNetwork& net, const ChainState& state, int m) {
  NodeRates r;
  switch (state.digits[m]) {
    case kSusceptible:
      for (int k = 0; k < net.n; ++k) {
        if (state.digits[k] == kInfected) r.to_infected += net.beta(m, k);
        else if (state.digits[k] == kPatched) r.to_patched += net.delta1(m, k);
      }
      break;
    case kInfected:
      r.to_susceptible = net.gamma[m];
      for (int k = 0; k < net.n; ++k)
        if (state.digits[k] == kPatched) r.to_patched += net.delta2(m, k);
      break;
    case kPatched:
      r.to_susceptible = net.alpha[m];
      break;
  }
  return r;
}

double exit_rate(const RateNetwork& net, const ChainState& state) {
  double total = 0.0;
  for (int m = 0; m < net.n; ++m) total += node_rates(net, state, m).total();
  return total;
}

GeneratorMatrix build_generator(const RateNetwork& net) {
  if (net.n < 1 || net.n > kMaxGeneratorNodes)
    throw std::invalid_argument("build_generator: n must be in 1.." +
                                std::to_string(kMaxGeneratorNodes));
  const std::uint64_t states = state_count(net.n);
  std::vector<std::uint64_t> power(net.n);
  for (int m = 0; m < net.n; ++m) power[m] = m == 0 ? 1 : power[m - 1] * 3;

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(states * (2 * net.n + 1));
  for (std::uint64_t from = 0; from < states; ++from) {
    const auto state = ChainState::from_index(from, net.n);
    double out = 0.0;
    const auto add = [&](std::uint64_t to, double rate) {
      if (rate > 0.0) {
        entries.emplace_back(static_cast<int>(from), static_cast<int>(to), rate);
        out += rate;
      }
    };
    for (int m = 0; m < net.n; ++m) {
      const auto r = node_rates(net, state, m);
      switch (state.digits[m]) {
        case kSusceptible:
          add(from + power[m], r.to_infected);
          add(from + 2 * power[m], r.to_patched);
          break;
        case kInfected:
          add(from - power[m], r.to_susceptible);
          add(from + power[m], r.to_patched);
          break;
        case kPatched:
          add(from - 2 * power[m], r.to_susceptible);
          break;
      }
    }
    if (out > 0.0) entries.emplace_back(static_cast<int>(from), static_cast<int>(from), -out);
  }
  GeneratorMatrix gen;
  gen.n = net.n;
  gen.q.resize(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  gen.q.setFromTriplets(entries.begin(), entries.end());
  gen.q.makeCompressed();
  return gen;
}

Eigen::VectorXd point_mass(const ChainState& state) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_count(state.nodes())));
  s[static_cast<Eigen::Index>(state.index())] = 1.0;
  return s;
}

ForwardSolution solve_forward(const GeneratorMatrix& gen, const Eigen::VectorXd& s0, double horizon,
                              const ForwardOptions& opts) {
  if (gen.n > kMaxForwardNodes)
    throw std::invalid_argument("solve_forward: n must be <= " + std::to_string(kMaxForwardNodes));
  if (s0.size() != gen.q.rows()) throw std::invalid_argument("solve_forward: s0 has wrong size");
  if ((s0.array() < 0.0).any() || std::abs(s0.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("solve_forward: s0 is not a probability distribution");
  if (!(horizon > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("solve_forward: horizon and dt must be positive");

  long steps_per_point;
  std::vector<double> grid;
  if (opts.grid_points >= 2) {
    grid = uniform_grid(horizon, opts.grid_points);
    steps_per_point = std::max(1L, static_cast<long>(std::ceil(grid[1] / opts.dt - 1e-9)));
  } else {
    const long steps = std::max(1L, static_cast<long>(std::ceil(horizon / opts.dt - 1e-9)));
    grid = uniform_grid(horizon, static_cast<int>(steps + 1));
    steps_per_point = 1;
  }
  const double h = grid[1] / static_cast<double>(steps_per_point);

  const SparseRowMatrix qt = gen.q.transpose();
  const auto rhs = [&qt](const Eigen::VectorXd& s, Eigen::VectorXd& d) { d.noalias() = qt * s; };
  Rk4<> rk4(s0.size());

  ForwardSolution sol;
  sol.times = grid;
  sol.distributions.resize(s0.size(), static_cast<Eigen::Index>(grid.size()));
  Eigen::VectorXd s = s0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0)
      for (long step = 0; step < steps_per_point; ++step) {
        rk4.step(rhs, s, h);
        if (s.minCoeff() < -1e-9)
          throw InvariantError("solve_forward: negative probability (dt too large?)");
      }
    s = s.cwiseMax(0.0);
    const double drift = std::abs(s.sum() - 1.0);
    sol.max_drift = std::max(sol.max_drift, drift);
    if (drift > 1e-9) sol.drift_flagged = true;
    if (drift > 1e-12) s /= s.sum();
    sol.distributions.col(static_cast<Eigen::Index>(k)) = s;
  }
  return sol;
}

Marginals marginals(const Eigen::VectorXd& dist, int n) {
  Marginals m{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  for (Eigen::Index idx = 0; idx < dist.size(); ++idx) {
    const double p = dist[idx];
    if (p == 0.0) continue;
    auto rest = static_cast<std::uint64_t>(idx);
    for (int k = 0; k < n; ++k) {
      const auto digit = rest % 3;
      rest /= 3;
      if (digit == kInfected) m.infected[k] += p;
      else if (digit == kPatched) m.patched[k] += p;
    }
  }
  return m;
}

Trajectory marginal_trajectory(const ForwardSolution& sol, int n) {
  Trajectory traj;
  traj.resize(n, sol.times.size());
  traj.times = sol.times;
  for (Eigen::Index k = 0; k < sol.distributions.cols(); ++k) {
    const auto m = marginals(sol.distributions.col(k), n);
    traj.infected.col(k) = m.infected;
    traj.patched.col(k) = m.patched;
  }
  return traj;
}

Eigen::VectorXd pairwise_rhs(const RateNetwork& net, const Eigen::VectorXd& dist) {
  const int n = net.n;
  // joint(a, b)(i, j) = Pr{X_i = a, X_j = b} for the three pairs the right side needs.
  Eigen::MatrixXd s_and_i = Eigen::MatrixXd::Zero(n, n);  // (0, 1)
  Eigen::MatrixXd s_and_p = Eigen::MatrixXd::Zero(n, n);  // (0, 2)
  Eigen::MatrixXd i_and_p = Eigen::MatrixXd::Zero(n, n);  // (1, 2)
  std::vector<std::uint8_t> digits(n);
  for (Eigen::Index idx = 0; idx < dist.size(); ++idx) {
    const double p = dist[idx];
    if (p == 0.0) continue;
    auto rest = static_cast<std::uint64_t>(idx);
    for (int k = 0; k < n; ++k) {
      digits[k] = static_cast<std::uint8_t>(rest % 3);
      rest /= 3;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (digits[i] == kSusceptible && digits[j] == kInfected) s_and_i(i, j) += p;
        else if (digits[i] == kSusceptible && digits[j] == kPatched) s_and_p(i, j) += p;
        else if (digits[i] == kInfected && digits[j] == kPatched) i_and_p(i, j) += p;
      }
  }
  const auto m = marginals(dist, n);
  const Eigen::VectorXd patch_infected = net.delta2.cwiseProduct(i_and_p).rowwise().sum();
  Eigen::VectorXd out(2 * n);
  out.head(n) = net.beta.cwiseProduct(s_and_i).rowwise().sum() - patch_infected -
                net.gamma.cwiseProduct(m.infected);
  out.tail(n) = net.delta1.cwiseProduct(s_and_p).rowwise().sum() + patch_infected -
                net.alpha.cwiseProduct(m.patched);
  return out;
}

PairwiseResidual pairwise_residual(const RateNetwork& net, const Eigen::VectorXd& s0, double horizon,
                              double dt) {
  if (net.n > kMaxPairwiseNodes)
    throw std::invalid_argument("pairwise_residual: n must be <= " + std::to_string(kMaxPairwiseNodes));
  const auto sol = solve_forward(build_generator(net), s0, horizon, {dt, 0});
  const auto traj = marginal_trajectory(sol, net.n);
  const double h = sol.times[1] - sol.times[0];

  PairwiseResidual res;
  for (Eigen::Index k = 1; k + 1 < sol.distributions.cols(); ++k) {
    Eigen::VectorXd fd(2 * net.n);
    fd.head(net.n) = (traj.infected.col(k + 1) - traj.infected.col(k - 1)) / (2 * h);
    fd.tail(net.n) = (traj.patched.col(k + 1) - traj.patched.col(k - 1)) / (2 * h);
    const double gap = (fd - pairwise_rhs(net, sol.distributions.col(k))).cwiseAbs().maxCoeff();
    if (gap > res.max_residual) {
      res.max_residual = gap;
      res.at_time = sol.times[k];
    }
  }
  return res;
}

}  // namespace sips
