#include "sips/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sips/errors.hpp"
#include "sips/rk4.hpp"

namespace sips {

Eigen::VectorXd PopulationState::packed() const {
  Eigen::VectorXd x(infected.size() + patched.size());
  x << infected, patched;
  return x;
}

PopulationState PopulationState::unpack(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

double PopulationState::omega_violation() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < infected.size(); ++i)
    worst = std::max({worst, -infected[i], -patched[i], infected[i] + patched[i] - 1.0});
  return worst;
}

void derivative_packed(const RateModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  const int n = model.n();
  const auto infected = x.head(n);
  const auto patched = x.tail(n);
  const Eigen::VectorXd f = model.f(infected);
  const Eigen::VectorXd g = model.g(patched);
  const Eigen::VectorXd h = model.h(patched);
  const auto& net = model.net();
  const Eigen::ArrayXd susceptible = 1.0 - infected.array() - patched.array();
  out.resize(2 * n);
  out.head(n) = susceptible * f.array() - infected.array() * h.array() -
                net.gamma.array() * infected.array();
  out.tail(n) = susceptible * g.array() + infected.array() * h.array() -
                net.alpha.array() * patched.array();
}

Eigen::VectorXd derivative(const RateModel& model, const PopulationState& x) {
  Eigen::VectorXd out;
  derivative_packed(model, x.packed(), out);
  return out;
}

double default_step(const RateModel& model) { return 0.01 / model.max_total_rate(); }

namespace {

void check_start(const RateModel& model, const PopulationState& x0, double omega_tol) {
  if (x0.infected.size() != model.n() || x0.patched.size() != model.n())
    throw std::invalid_argument("initial state has the wrong size");
  if (!x0.infected.allFinite() || !x0.patched.allFinite() || x0.omega_violation() > omega_tol)
    throw InvariantError("initial state lies outside Omega");
}

// Projects round-off excursions back into Omega.
void project(Eigen::VectorXd& x, int n, double omega_tol) {
  if (!x.allFinite()) throw InvariantError("integration produced non-finite values");
  for (int i = 0; i < n; ++i) {
    double& inf = x[i];
    double& pat = x[n + i];
    const double excess = std::max({-inf, -pat, inf + pat - 1.0});
    if (excess > omega_tol)
      throw InvariantError("trajectory left Omega by " + std::to_string(excess) +
                           " at node " + std::to_string(i) + " (step too large?)");
    inf = std::max(inf, 0.0);
    pat = std::max(pat, 0.0);
    if (const double total = inf + pat; total > 1.0) {
      inf /= total;
      pat /= total;
    }
  }
}

}  // namespace

Trajectory integrate(const RateModel& model, const PopulationState& x0, double horizon,
                     const IntegrateOptions& opts) {
  if (!(horizon > 0.0)) throw std::invalid_argument("integration horizon must be positive");
  check_start(model, x0, opts.omega_tol);
  const int n = model.n();
  const double dt = opts.dt > 0.0 ? opts.dt : default_step(model);

  std::vector<double> grid;
  long steps_per_point;
  if (opts.grid_points >= 2) {
    grid = uniform_grid(horizon, opts.grid_points);
    steps_per_point = std::max(1L, static_cast<long>(std::ceil(grid[1] / dt - 1e-9)));
  } else {
    const long steps = std::max(1L, static_cast<long>(std::ceil(horizon / dt - 1e-9)));
    grid = uniform_grid(horizon, static_cast<int>(steps + 1));
    steps_per_point = 1;
  }
  const double h = grid[1] / static_cast<double>(steps_per_point);

  Trajectory traj;
  traj.resize(n, grid.size());
  traj.times = grid;

  Eigen::VectorXd x = x0.packed();
  project(x, n, opts.omega_tol);
  Rk4<> rk4(2 * n);
  const auto rhs = [&model](const Eigen::VectorXd& s, Eigen::VectorXd& d) {
    derivative_packed(model, s, d);
  };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0)
      for (long s = 0; s < steps_per_point; ++s) {
        rk4.step(rhs, x, h);
        project(x, n, opts.omega_tol);
      }
    traj.infected.col(static_cast<Eigen::Index>(k)) = x.head(n);
    traj.patched.col(static_cast<Eigen::Index>(k)) = x.tail(n);
  }
  return traj;
}

SteadyState steady_state(const RateModel& model, const PopulationState& x0,
                         const SteadyStateOptions& opts) {
  check_start(model, x0, opts.omega_tol);
  const int n = model.n();
  const double dt = opts.dt > 0.0 ? opts.dt : default_step(model);
  Eigen::VectorXd x = x0.packed();
  project(x, n, opts.omega_tol);
  Eigen::VectorXd slope(2 * n);
  Rk4<> rk4(2 * n);
  const auto rhs = [&model](const Eigen::VectorXd& s, Eigen::VectorXd& d) {
    derivative_packed(model, s, d);
  };

  SteadyState out;
  double t = 0.0;
  for (;;) {
    derivative_packed(model, x, slope);
    out.derivative_norm = slope.cwiseAbs().maxCoeff();
    if (out.derivative_norm < opts.tol) {
      out.converged = true;
      break;
    }
    if (t >= opts.t_max) break;
    rk4.step_with_slope(rhs, x, slope, dt);
    project(x, n, opts.omega_tol);
    t += dt;
  }
  out.state = PopulationState::unpack(x);
  out.time = t;
  return out;
}

}  // namespace sips
