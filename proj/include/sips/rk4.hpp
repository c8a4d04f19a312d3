#pragma once

#include <Eigen/Dense>

namespace sips {

/// Classical fixed-step fourth-order Runge-Kutta for x' = rhs(x), with the stage
/// buffers kept between steps. `rhs(x, dxdt)` writes the derivative into dxdt.
template <typename Vector = Eigen::VectorXd>
class Rk4 {
 public:
  explicit Rk4(Eigen::Index size) : tmp_(size), k1_(size), k2_(size), k3_(size), k4_(size) {}

  template <typename Rhs>
  void step(Rhs&& rhs, Vector& x, double dt) {
    rhs(x, k1_);
    advance(rhs, x, dt);
  }

  /// Same as step() but reuses a derivative already evaluated at x.
  template <typename Rhs>
  void step_with_slope(Rhs&& rhs, Vector& x, const Vector& slope, double dt) {
    k1_ = slope;
    advance(rhs, x, dt);
  }

 private:
  template <typename Rhs>
  void advance(Rhs&& rhs, Vector& x, double dt) {
    const double half = dt / 2;
    tmp_ = x + half * k1_;
    rhs(tmp_, k2_);
    tmp_ = x + half * k2_;
    rhs(tmp_, k3_);
    tmp_ = x + dt * k3_;
    rhs(tmp_, k4_);
    x += (dt / 6) * (k1_ + 2 * k2_ + 2 * k3_ + k4_);
  }

  Vector tmp_, k1_, k2_, k3_, k4_;
};

}  // namespace sips
