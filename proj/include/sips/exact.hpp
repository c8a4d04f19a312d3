#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sips/network.hpp"
#include "sips/trajectory.hpp"

namespace sips {

/// Node states of the Markov chain.
enum NodeState : std::uint8_t { kSusceptible = 0, kInfected = 1, kPatched = 2 };

/// Joint state of all nodes; node k is base-3 digit k of the index.
struct ChainState {
  std::vector<std::uint8_t> digits;

  int nodes() const { return static_cast<int>(digits.size()); }
  std::uint64_t index() const;
  static ChainState from_index(std::uint64_t index, int n);
  static ChainState susceptible(int n) { return {std::vector<std::uint8_t>(n, kSusceptible)}; }
};

/// 3^n, the number of chain states.
std::uint64_t state_count(int n);

/// Parses "i:3,p:7" (0-based node ids, any number of i:/p: items) into a state
/// with the named nodes infected / patched and every other node susceptible.
ChainState parse_init(const std::string& spec, int n);

/// Rates at which a single node leaves its current state, split by target.
struct NodeRates {
  double to_susceptible = 0.0;
  double to_infected = 0.0;
  double to_patched = 0.0;

  double total() const { return to_susceptible + to_infected + to_patched; }
};

/// Transition rates of `node` in `state`:
///   susceptible -> infected  at sum_k beta_mk   [x_k infected]
///   susceptible -> patched   at sum_k delta1_mk [x_k patched]
///   infected    -> susceptible at gamma_m
///   infected    -> patched   at sum_k delta2_mk [x_k patched]
///   patched     -> susceptible at alpha_m
NodeRates node_rates(const RateNetwork& net, const ChainState& state, int node);

/// Total exit rate of a state as the sampler sees it (equals -Q_ii).
double exit_rate(const RateNetwork& net, const ChainState& state);

// ---------------------------------------------------------------------------
// Generator and forward equation

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct GeneratorMatrix {
  int n = 0;
  SparseRowMatrix q;  // row = from-state, 3^n x 3^n
};

inline constexpr int kMaxGeneratorNodes = 12;
inline constexpr int kMaxForwardNodes = 8;
inline constexpr int kMaxPairwiseNodes = 6;

GeneratorMatrix build_generator(const RateNetwork& net);

struct ForwardOptions {
  double dt = 1e-3;
  int grid_points = 0;  // 0: record every step
};

struct ForwardSolution {
  std::vector<double> times;
  Eigen::MatrixXd distributions;  // 3^n x times.size(), one distribution per column
  double max_drift = 0.0;         // largest |sum - 1| seen before renormalization
  bool drift_flagged = false;     // drift exceeded 1e-9 somewhere
};

/// RK4 on ds^T/dt = s^T Q. Throws InvariantError if a probability drops below -1e-9.
ForwardSolution solve_forward(const GeneratorMatrix& gen, const Eigen::VectorXd& s0, double horizon,
                              const ForwardOptions& opts = {});

Eigen::VectorXd point_mass(const ChainState& state);

/// Node marginals I_i = Pr{X_i = 1}, P_i = Pr{X_i = 2} of a distribution.
struct Marginals {
  Eigen::VectorXd infected, patched;
};

Marginals marginals(const Eigen::VectorXd& dist, int n);
Trajectory marginal_trajectory(const ForwardSolution& sol, int n);

/// Right side of the pairwise (joint-probability) form of the exact model evaluated
/// on a full distribution; stacked as (dI_1..dI_N, dP_1..dP_N).
Eigen::VectorXd pairwise_rhs(const RateNetwork& net, const Eigen::VectorXd& dist);

struct PairwiseResidual {
  double max_residual = 0.0;
  double at_time = 0.0;
};

/// Largest gap between pairwise_rhs and the centred difference of the marginals along
/// a forward solution with step dt.
PairwiseResidual pairwise_residual(const RateNetwork& net, const Eigen::VectorXd& s0, double horizon,
                              double dt);

// ---------------------------------------------------------------------------
// Gillespie sampler

struct GillespieOptions {
  int paths = 10000;
  std::uint64_t seed = 0;
  int grid_points = 200;
  int threads = 0;  // 0: hardware concurrency
  bool allow_reducible = false;
};

struct SampledTrajectory {
  Trajectory average;  // averaged indicators on the grid
  int paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;  // total transitions over all paths
};

/// Averages `paths` independent sample paths of the chain started at x0. Path p draws
/// from its own engine seeded with derive_seed(seed, p); per-grid-point indicator
/// counts are summed as integers, so results do not depend on thread count.
SampledTrajectory gillespie(const RateNetwork& net, const ChainState& x0, double horizon,
                            const GillespieOptions& opts = {});

}  // namespace sips
