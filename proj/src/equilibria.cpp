#include "sips/equilibria.hpp"

#include "sips/errors.hpp"

namespace sips {

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::susceptible: return "susceptible";
    case EquilibriumKind::infected: return "infected";
    case EquilibriumKind::patched: return "patched";
    case EquilibriumKind::mixed: return "mixed";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::susceptible_attractor: return "susceptible_attractor";
    case Regime::infected_attractor: return "infected_attractor";
    case Regime::patched_attractor: return "patched_attractor";
    case Regime::mixed_attractor: return "mixed_attractor";
    case Regime::unclassified: return "unclassified";
  }
  return "unknown";
}

namespace {

struct FixedPoint {
  Eigen::VectorXd x;
  int iterations;
  double residual;
};

// Monotone iteration x <- T(x). From an upper solution the iterates decrease to the
// largest fixed point, which is the unique positive one under the concavity conditions.
template <typename Map>
FixedPoint iterate(Map&& map, int n, const FixedPointOptions& opts, const char* what) {
  Eigen::VectorXd x = opts.start ? *opts.start : Eigen::VectorXd::Ones(n);
  if (x.size() != n) throw std::invalid_argument("fixed-point start has the wrong size");
  for (long it = 1; it <= opts.max_iterations; ++it) {
    Eigen::VectorXd next = map(x);
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = std::move(next);
    if (x.maxCoeff() < opts.collapse_floor)
      throw CollapseError(std::string(what) + ": iteration collapsed to the origin");
    // Relative stop: a geometric decay toward the origin never satisfies it, so
    // sub-threshold inputs run on until the collapse floor.
    if (step < opts.tol * x.maxCoeff()) {
      const double residual = (x - map(x)).cwiseAbs().maxCoeff();
      return {x, static_cast<int>(it), residual};
    }
  }
  throw ConvergenceError(std::string(what) + ": no convergence within the iteration budget");
}

void require_above_threshold(double s, const FixedPointOptions& opts, const char* what,
                             const char* matrix) {
  if (opts.check_threshold && s <= opts.sign.zero_tol)
    throw CollapseError(std::string(what) + ": s(" + matrix + ") = " + std::to_string(s) +
                        " <= 0, no positive equilibrium");
}

}  // namespace

EquilibriumResult infected_equilibrium(const RateModel& model, const FixedPointOptions& opts) {
  if (opts.check_threshold)
    require_above_threshold(spectral_abscissa(q_matrices(model).q1, opts.power).value, opts,
                            "infected_equilibrium", "Q1");
  const auto& gamma = model.net().gamma;
  auto fp = iterate(
      [&](const Eigen::VectorXd& x) {
        const Eigen::ArrayXd f = model.f(x).array();
        return Eigen::VectorXd(f / (gamma.array() + f));
      },
      model.n(), opts, "infected_equilibrium");
  return {EquilibriumKind::infected, fp.x, Eigen::VectorXd::Zero(model.n()), fp.iterations,
          fp.residual};
}

EquilibriumResult patched_equilibrium(const RateModel& model, const FixedPointOptions& opts) {
  if (opts.check_threshold)
    require_above_threshold(spectral_abscissa(q_matrices(model).q2, opts.power).value, opts,
                            "patched_equilibrium", "Q2");
  const auto& alpha = model.net().alpha;
  auto fp = iterate(
      [&](const Eigen::VectorXd& x) {
        const Eigen::ArrayXd g = model.g(x).array();
        return Eigen::VectorXd(g / (alpha.array() + g));
      },
      model.n(), opts, "patched_equilibrium");
  return {EquilibriumKind::patched, Eigen::VectorXd::Zero(model.n()), fp.x, fp.iterations,
          fp.residual};
}

EquilibriumResult mixed_equilibrium(const RateModel& model, const FixedPointOptions& opts) {
  if (!model.g_equals_h())
    throw InvariantError("mixed_equilibrium: requires identical patching rates g == h");
  FixedPointOptions patched_opts = opts;
  patched_opts.start.reset();
  const Eigen::VectorXd p_star = *patched_equilibrium(model, patched_opts).patched;

  if (opts.check_threshold)
    require_above_threshold(spectral_abscissa(mixed_criterion_matrix(model, p_star), opts.power).value,
                            opts, "mixed_equilibrium", "mixed criterion matrix");

  const auto& gamma = model.net().gamma;
  const Eigen::ArrayXd h_star = model.h(p_star).array();
  const Eigen::ArrayXd room = 1.0 - p_star.array();
  auto fp = iterate(
      [&](const Eigen::VectorXd& x) {
        const Eigen::ArrayXd f = model.f(x).array();
        return Eigen::VectorXd(room * f / (gamma.array() + f + h_star));
      },
      model.n(), opts, "mixed_equilibrium");
  return {EquilibriumKind::mixed, fp.x, p_star, fp.iterations, fp.residual};
}

RegimeReport classify(const RateModel& model, const FixedPointOptions& opts) {
  RegimeReport report;
  report.spectral = spectral_report(model, opts.power);
  const double zero = opts.sign.zero_tol;
  const bool virus_grows = report.spectral.q1.value > zero;
  const bool patch_grows = report.spectral.q2.value > zero;

  FixedPointOptions fp = opts;
  fp.start.reset();
  fp.check_threshold = false;  // signs are already known here

  std::optional<EquilibriumResult> infected, patched, mixed;
  if (virus_grows) {
    infected = infected_equilibrium(model, fp);
    report.infected_star = infected->infected->mean();
  }
  if (patch_grows) {
    patched = patched_equilibrium(model, fp);
    report.patched_star = patched->patched->mean();
    if (model.g_equals_h()) {
      report.spectral.mixed =
          spectral_abscissa(mixed_criterion_matrix(model, *patched->patched), opts.power);
      if (report.spectral.mixed->value > zero) {
        mixed = mixed_equilibrium(model, fp);
        report.infected_mixed = mixed->infected->mean();
        report.patched_mixed = mixed->patched->mean();
      }
    }
  }

  if (!virus_grows && !patch_grows) {
    report.predicted = Regime::susceptible_attractor;
    const int n = model.n();
    report.equilibrium = EquilibriumResult{EquilibriumKind::susceptible, Eigen::VectorXd::Zero(n),
                                           Eigen::VectorXd::Zero(n), 0, 0.0};
  } else if (virus_grows && report.spectral.q4.value <= zero) {
    report.predicted = Regime::infected_attractor;
    report.equilibrium = infected;
  } else if (!virus_grows && patch_grows) {
    report.predicted = Regime::patched_attractor;
    report.equilibrium = patched;
  } else if (mixed) {
    report.predicted = Regime::mixed_attractor;
    report.equilibrium = mixed;
  } else {
    report.predicted = Regime::unclassified;
  }
  return report;
}

}  // namespace sips
