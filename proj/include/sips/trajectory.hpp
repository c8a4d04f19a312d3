#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace sips {

/// Per-node infection/patch probabilities on a time grid. Column k of `infected`
/// and `patched` is the state at times[k]. Used for ODE solutions, forward-equation
/// marginals and Gillespie averages alike.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd infected;  // n x times.size()
  Eigen::MatrixXd patched;

  int nodes() const { return static_cast<int>(infected.rows()); }
  std::size_t size() const { return times.size(); }

  /// Population means I(t), P(t).
  Eigen::VectorXd infected_mean() const { return infected.colwise().mean().transpose(); }
  Eigen::VectorXd patched_mean() const { return patched.colwise().mean().transpose(); }

  void resize(int n, std::size_t points) {
    times.assign(points, 0.0);
    infected.setZero(n, static_cast<Eigen::Index>(points));
    patched.setZero(n, static_cast<Eigen::Index>(points));
  }
};

/// Uniform grid of `points` times on [0, horizon].
std::vector<double> uniform_grid(double horizon, int points);

/// CSV with columns t, I_1..I_N, P_1..P_N, I_agg, P_agg (node k is column k+1).
void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_csv(const std::filesystem::path& path);

}  // namespace sips
