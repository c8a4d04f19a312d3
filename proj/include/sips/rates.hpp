#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sips/network.hpp"

namespace sips {

/// Concrete rate-function families. Each maps the linear pressure
/// s_i = sum_j w_ij x_j through a per-node saturation curve:
///   linear               s
///   exp_saturating       a (1 - exp(-s / a))      a > 0
///   rational_saturating  s / (1 + c s)            c >= 0
/// All three have unit slope at s = 0, so their Jacobian at the origin is w.
enum class RateFamily { linear, exp_saturating, rational_saturating };

std::string to_string(RateFamily family);
RateFamily parse_family(const std::string& name);

/// Per-node saturation parameters for f, g and h. Ignored by the linear family.
struct Saturation {
  Eigen::VectorXd f, g, h;

  static Saturation uniform(int n, double level);
};

class RateModel {
 public:
  /// With tie_h_to_g the patching rate of infected nodes reuses g (delta2 := delta1
  /// and h's saturation := g's), which is the g == h case.
  RateModel(RateNetwork net, RateFamily family = RateFamily::linear, Saturation saturation = {},
            bool tie_h_to_g = false);

  static RateModel linear(RateNetwork net, bool tie_h_to_g = false) {
    return RateModel(std::move(net), RateFamily::linear, {}, tie_h_to_g);
  }

  const RateNetwork& net() const noexcept { return net_; }
  int n() const noexcept { return net_.n; }
  RateFamily family() const noexcept { return family_; }
  const Saturation& saturation() const noexcept { return saturation_; }

  /// True when g and h are the same function.
  bool g_equals_h() const noexcept { return g_equals_h_; }

  Eigen::VectorXd f(const Eigen::VectorXd& infected) const;
  Eigen::VectorXd g(const Eigen::VectorXd& patched) const;
  Eigen::VectorXd h(const Eigen::VectorXd& patched) const;

  /// Largest per-node total event rate; sets the default ODE step.
  double max_total_rate() const;

 private:
  Eigen::VectorXd saturate(Eigen::VectorXd pressure, const Eigen::VectorXd& level) const;

  RateNetwork net_;
  RateFamily family_;
  Saturation saturation_;
  bool g_equals_h_;
};

struct RateValues {
  Eigen::VectorXd f, g, h;
};

/// Rates at a point of Omega; throws InvariantError if (I, P) lies outside
/// Omega by more than omega_tol.
RateValues eval_rates(const RateModel& model, const Eigen::VectorXd& infected,
                      const Eigen::VectorXd& patched, double omega_tol = 1e-9);

// ---------------------------------------------------------------------------
// Condition checks (proximity, nullity, smoothness, monotonicity, concavity)

/// One rate map x -> r(x) together with its declared dependency pattern
/// (support(i, j) > 0 iff r_i depends on x_j).
struct RateComponent {
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  Eigen::MatrixXd support;
};

struct ConditionTolerances {
  double nullity = 1e-8;
  double gradient = 1e-6;
  double hessian = 1e-6;
};

struct ConditionResult {
  bool passed = true;
  double worst = 0.0;  // largest observed violation; 0 when none
};

struct ConditionReport {
  ConditionResult proximity;     // C1: zero gradient off the declared support
  ConditionResult nullity;       // C2
  ConditionResult smoothness;    // C3: finite values and differences
  ConditionResult monotonicity;  // C4: gradient > -tol on the support
  ConditionResult concavity;     // C5: second differences <= tol
  ConditionResult nonnegative;   // rates >= 0 on [0,1]^N

  bool ok() const {
    return proximity.passed && nullity.passed && smoothness.passed && monotonicity.passed &&
           concavity.passed && nonnegative.passed;
  }
};

ConditionReport check_rate_conditions(const std::vector<RateComponent>& components, int n,
                                      int sample_count, std::uint64_t seed,
                                      const ConditionTolerances& tol = {});

std::vector<RateComponent> rate_components(const RateModel& model);

ConditionReport validate_conditions(const RateModel& model, int sample_count = 1000,
                                    std::uint64_t seed = 0, const ConditionTolerances& tol = {});

/// Sampled pointwise comparison of g and h over [0,1]^N.
struct RateOrdering {
  bool g_ge_h = true;
  bool g_le_h = true;
};

RateOrdering sampled_ordering(const RateModel& model, int sample_count = 1000,
                              std::uint64_t seed = 0, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Jacobians at the origin

struct QMatrices {
  Eigen::MatrixXd q1;  // df/dx(0) - D_gamma
  Eigen::MatrixXd q2;  // dg/dx(0) - D_alpha
  Eigen::MatrixXd q3;  // dh/dx(0) - D_alpha
  Eigen::MatrixXd q4;  // max(dg/dx(0), dh/dx(0)) - D_alpha
};

QMatrices q_matrices(const RateModel& model);

}  // namespace sips
