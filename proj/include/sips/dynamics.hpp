#pragma once

#include <Eigen/Dense>

#include "sips/rates.hpp"
#include "sips/trajectory.hpp"

namespace sips {

/// Point (I, P) of Omega = {I_i, P_i >= 0, I_i + P_i <= 1}.
struct PopulationState {
  Eigen::VectorXd infected;
  Eigen::VectorXd patched;

  static PopulationState zeros(int n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }

  /// Stacked 2N vector (I_1..I_N, P_1..P_N).
  Eigen::VectorXd packed() const;
  static PopulationState unpack(const Eigen::VectorXd& x);

  /// Largest distance outside Omega (0 when inside).
  double omega_violation() const;
};

/// Right-hand side of the generic model:
///   dI_i/dt = (1 - I_i - P_i) f_i(I) - I_i h_i(P) - gamma_i I_i
///   dP_i/dt = (1 - I_i - P_i) g_i(P) + I_i h_i(P) - alpha_i P_i
/// returned as a stacked 2N vector.
Eigen::VectorXd derivative(const RateModel& model, const PopulationState& x);

/// Same, on the stacked representation, writing into `out`.
void derivative_packed(const RateModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& out);

/// Default step: 0.01 / (largest per-node total rate).
double default_step(const RateModel& model);

struct IntegrateOptions {
  double dt = 0.0;      // <= 0 selects default_step()
  int grid_points = 0;  // output grid size; 0 records every integration step
  /// States outside Omega by at most this much are projected back; further out is an error.
  double omega_tol = 1e-6;
};

/// Fixed-step RK4 on [0, horizon]. The step is shrunk so that every output grid
/// point is hit exactly. Throws InvariantError on an Omega violation beyond
/// omega_tol or on non-finite values.
Trajectory integrate(const RateModel& model, const PopulationState& x0, double horizon,
                     const IntegrateOptions& opts = {});

struct SteadyStateOptions {
  double tol = 1e-8;  // on the sup norm of the derivative
  double t_max = 1e4;
  double dt = 0.0;
  double omega_tol = 1e-6;
};

struct SteadyState {
  PopulationState state;
  bool converged = false;
  double time = 0.0;
  double derivative_norm = 0.0;
};

SteadyState steady_state(const RateModel& model, const PopulationState& x0,
                         const SteadyStateOptions& opts = {});

}  // namespace sips
