#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sips/rates.hpp"
#include "sips/spectral.hpp"

namespace sips {

enum class EquilibriumKind { susceptible, infected, patched, mixed };

std::string to_string(EquilibriumKind kind);

struct EquilibriumResult {
  EquilibriumKind kind = EquilibriumKind::susceptible;
  std::optional<Eigen::VectorXd> infected;  // I* or I**
  std::optional<Eigen::VectorXd> patched;   // P* (= P**)
  int iterations = 0;
  double residual = 0.0;  // sup-norm of x - T(x) at the returned point
};

struct FixedPointOptions {
  double tol = 1e-13;  // on successive iterates, relative to the largest entry
  long max_iterations = 20'000'000;
  double collapse_floor = 1e-12;
  /// Start point of the iteration; defaults to the all-ones upper solution.
  std::optional<Eigen::VectorXd> start;
  /// Reject sub-threshold inputs up front from the sign of the relevant abscissa.
  bool check_threshold = true;
  PowerOptions power;
  SignOptions sign;
};

/// Unique positive fixed point of T_i(x) = f_i(x) / (gamma_i + f_i(x)); requires s(Q1) > 0.
/// Throws CollapseError when the iteration decays to the origin (or s(Q1) <= 0 is
/// detected), ConvergenceError when the budget runs out.
EquilibriumResult infected_equilibrium(const RateModel& model, const FixedPointOptions& opts = {});

/// Same scheme with T_i(x) = g_i(x) / (alpha_i + g_i(x)); requires s(Q2) > 0.
EquilibriumResult patched_equilibrium(const RateModel& model, const FixedPointOptions& opts = {});

/// P** = P* from patched_equilibrium, then the fixed point of
/// T_i(x) = (1 - P*_i) f_i(x) / (gamma_i + f_i(x) + h_i(P*)). Requires g == h, s(Q2) > 0
/// and a positive mixed criterion.
EquilibriumResult mixed_equilibrium(const RateModel& model, const FixedPointOptions& opts = {});

enum class Regime {
  susceptible_attractor,
  infected_attractor,
  patched_attractor,
  mixed_attractor,
  unclassified
};

std::string to_string(Regime regime);

struct RegimeReport {
  SpectralReport spectral;
  Regime predicted = Regime::unclassified;
  std::optional<EquilibriumResult> equilibrium;
  // Population means of the equilibria that exist.
  std::optional<double> infected_star, patched_star, infected_mixed, patched_mixed;
};

/// Applies, in order: both abscissas <= 0 -> susceptible; s(Q1) > 0 and s(Q4) <= 0 ->
/// infected; s(Q1) <= 0 and s(Q2) > 0 -> patched; g == h, s(Q2) > 0 and a positive mixed
/// criterion -> mixed; otherwise unclassified.
RegimeReport classify(const RateModel& model, const FixedPointOptions& opts = {});

}  // namespace sips
