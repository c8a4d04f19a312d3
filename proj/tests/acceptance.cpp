// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. All seeds are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sips/dynamics.hpp"
#include "sips/equilibria.hpp"
#include "sips/errors.hpp"
#include "sips/exact.hpp"
#include "sips/harness.hpp"
#include "sips/spectral.hpp"
#include "test_util.hpp"

using namespace sips;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

PopulationState random_interior(int n, Engine& rng) {
  auto x = PopulationState::zeros(n);
  for (int i = 0; i < n; ++i) {
    x.infected[i] = uniform(rng, 0.05, 0.6);
    x.patched[i] = uniform(rng, 0.05, 0.95 - x.infected[i]);
  }
  return x;
}

double sup_distance(const PopulationState& x, const Eigen::VectorXd& infected,
                    const Eigen::VectorXd& patched) {
  return std::max((x.infected - infected).cwiseAbs().maxCoeff(),
                  (x.patched - patched).cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  constexpr int kPaths = 10000;
  const double bound = 3.0 * std::sqrt(0.25 / kPaths);
  RateRanges ranges;
  ranges.beta = ranges.delta1 = ranges.delta2 = {0.3, 1.5};
  double worst = 0.0;
  int instances = 0;
  for (int n : {2, 3, 4, 5, 4, 3}) {
    const auto idx = static_cast<std::uint64_t>(instances);
    const auto net = generate_scale_free(n, std::min(2, n - 1), ranges, derive_seed(101, idx), {false});
    auto x0 = ChainState::susceptible(n);
    x0.digits[0] = kInfected;
    x0.digits[n - 1] = kPatched;
    GillespieOptions opts;
    opts.paths = kPaths;
    opts.seed = derive_seed(202, idx);
    opts.grid_points = 200;
    const auto sampled = gillespie(net, x0, 20.0, opts);
    const auto exact =
        marginal_trajectory(solve_forward(build_generator(net), point_mass(x0), 20.0, {1e-3, 200}), n);
    const double sup = std::max((sampled.average.infected - exact.infected).cwiseAbs().maxCoeff(),
                                (sampled.average.patched - exact.patched).cwiseAbs().maxCoeff());
    worst = std::max(worst, sup);
    ++instances;
  }
  return {worst <= bound, fmt("%d networks, worst node-level sup deviation %.4f (bound %.4f)",
                              instances, worst, bound)};
}

Outcome pairwise_residual_check() {
  Engine rng(303);
  double worst = 0.0, ratio_lo = 1e9, ratio_hi = 0.0;
  for (int n : {2, 3, 4}) {
    const auto net = testing::random_network(n, rng, 0.2, 1.2);
    auto x0 = ChainState::susceptible(n);
    x0.digits[0] = kInfected;
    x0.digits[n - 1] = kPatched;
    const auto s0 = point_mass(x0);
    const double fine = pairwise_residual(net, s0, 5.0, 1e-3).max_residual;
    const double coarse = pairwise_residual(net, s0, 5.0, 2e-3).max_residual;
    worst = std::max(worst, fine);
    ratio_lo = std::min(ratio_lo, coarse / fine);
    ratio_hi = std::max(ratio_hi, coarse / fine);
  }
  const bool ok = worst <= 1e-5 && ratio_lo > 3.5 && ratio_hi < 4.5;
  return {ok, fmt("max residual %.2e at dt=1e-3, halving ratio in [%.3f, %.3f]", worst, ratio_lo,
                  ratio_hi)};
}

Outcome abscissa_oracle() {
  Engine rng(404);
  double worst = 0.0, worst_shift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 5));
    const auto a = testing::random_metzler(n, rng);
    const auto r = spectral_abscissa(a);
    worst = std::max(worst, std::abs(r.value - testing::oracle_abscissa(a)));
    const auto other = spectral_abscissa(a, {}, r.shift + uniform(rng, 0.5, 5.0));
    worst_shift = std::max(worst_shift, std::abs(other.value - r.value));
  }
  return {worst <= 1e-8 && worst_shift < 1e-8,
          fmt("100 matrices: oracle gap %.2e, shift change %.2e", worst, worst_shift)};
}

Outcome extinction() {
  RateRanges ranges;
  ranges.beta = ranges.delta1 = ranges.delta2 = {0.02, 0.12};
  ranges.gamma = ranges.alpha = {1.0, 1.5};
  Engine rng(505);
  double worst = 0.0;
  int built = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto net = generate_small_world(12, 4, 0.2, ranges, derive_seed(505, k));
    const auto model = RateModel::linear(net);
    if (!extinction_conditions(model).c) return {false, "constructed instance misses the column-sum condition"};
    ++built;
    for (int start = 0; start < 3; ++start) {
      const auto s = steady_state(model, random_interior(net.n, rng), {1e-12, 1e4});
      if (!s.converged) return {false, "steady state did not converge"};
      worst = std::max({worst, s.state.infected.cwiseAbs().maxCoeff(), s.state.patched.cwiseAbs().maxCoeff()});
    }
  }
  return {worst < 1e-6, fmt("%d instances x 3 starts, max |(I,P)| %.2e", built, worst)};
}

// Draws instances until `want` satisfy `accept`; returns them.
std::vector<RateModel> collect(int want, std::uint64_t seed, const RateRanges& ranges, bool tie,
                               const std::function<bool(const RateModel&, const SpectralReport&)>& accept) {
  std::vector<RateModel> out;
  for (std::uint64_t k = 0; static_cast<int>(out.size()) < want && k < 1000; ++k) {
    const auto net = generate_scale_free(10, 2, ranges, derive_seed(seed, k));
    RateModel model = RateModel::linear(net, tie);
    if (accept(model, spectral_report(model))) out.push_back(std::move(model));
  }
  return out;
}

Outcome infected_attractor() {
  RateRanges ranges;
  ranges.beta = {0.4, 1.2};
  ranges.delta1 = ranges.delta2 = {0.02, 0.1};
  ranges.alpha = {1.0, 1.5};
  // Margin of 0.02 on both signs keeps the approach rate away from zero.
  const auto models = collect(10, 606, ranges, false, [](const RateModel&, const SpectralReport& r) {
    return r.q1.value > 0.02 && r.q4.value <= -0.02;
  });
  if (models.size() < 10) return {false, "could not draw 10 instances"};
  Engine rng(607);
  double worst = 0.0, worst_p = 0.0;
  for (const auto& model : models) {
    const auto eq = infected_equilibrium(model);
    for (int start = 0; start < 2; ++start) {
      const auto s = steady_state(model, random_interior(model.n(), rng), {1e-12, 1e4});
      if (!s.converged) return {false, "steady state did not converge"};
      worst = std::max(worst, (s.state.infected - *eq.infected).cwiseAbs().maxCoeff());
      worst_p = std::max(worst_p, s.state.patched.cwiseAbs().maxCoeff());
    }
  }
  // Two-node case with I* = 1 - gamma / b.
  const double b = 2.5, gamma = 0.8;
  const auto pair = RateModel::linear(testing::symmetric_pair(b, 0.1, 0.1, gamma, 1.0));
  const auto analytic = infected_equilibrium(pair);
  const double pair_gap = (analytic.infected->array() - (1.0 - gamma / b)).abs().maxCoeff();
  PopulationState x0{Eigen::Vector2d(0.3, 0.1), Eigen::Vector2d(0.2, 0.4)};
  const auto s = steady_state(pair, x0, {1e-13, 1e4});
  const double pair_ode = (s.state.infected.array() - (1.0 - gamma / b)).abs().maxCoeff();
  const bool ok = worst <= 1e-6 && worst_p <= 1e-6 && pair_gap <= 1e-12 && pair_ode <= 1e-10;
  return {ok, fmt("10 instances: |I - I*| %.2e, |P| %.2e; two-node I* gap %.1e (fixed point), %.1e (ODE)",
                  worst, worst_p, pair_gap, pair_ode)};
}

Outcome patched_and_mixed() {
  Engine rng(707);
  RateRanges patched_ranges;
  patched_ranges.beta = {0.02, 0.1};
  patched_ranges.delta1 = patched_ranges.delta2 = {0.3, 1.2};
  const auto patched = collect(10, 708, patched_ranges, false, [](const RateModel&, const SpectralReport& r) {
    return r.q1.value <= -0.02 && r.q2.value > 0.02;
  });

  RateRanges mixed_ranges;
  mixed_ranges.beta = {0.8, 2.0};
  mixed_ranges.delta1 = mixed_ranges.delta2 = {0.2, 0.6};
  const auto mixed = collect(10, 709, mixed_ranges, true, [](const RateModel& m, const SpectralReport& r) {
    if (!(r.q1.value > 0.02 && r.q2.value > 0.02)) return false;
    const auto p_star = *patched_equilibrium(m).patched;
    return spectral_abscissa(mixed_criterion_matrix(m, p_star)).value > 0.02;
  });
  if (patched.size() < 10 || mixed.size() < 10) return {false, "could not draw 10 instances of each kind"};

  double worst_patched = 0.0, worst_mixed = 0.0;
  bool same_p = true, inside = true;
  for (const auto& model : patched) {
    const auto eq = patched_equilibrium(model);
    for (int start = 0; start < 2; ++start) {
      const auto s = steady_state(model, random_interior(model.n(), rng), {1e-12, 1e4});
      if (!s.converged) return {false, "steady state did not converge"};
      worst_patched = std::max(worst_patched, sup_distance(s.state, *eq.infected, *eq.patched));
    }
  }
  for (const auto& model : mixed) {
    const auto eq = mixed_equilibrium(model);
    same_p = same_p && *eq.patched == *patched_equilibrium(model).patched;
    inside = inside && eq.infected->minCoeff() > 0.0 &&
             ((1.0 - eq.patched->array()) - eq.infected->array()).minCoeff() > 0.0;
    for (int start = 0; start < 2; ++start) {
      const auto s = steady_state(model, random_interior(model.n(), rng), {1e-12, 1e4});
      if (!s.converged) return {false, "steady state did not converge"};
      worst_mixed = std::max(worst_mixed, sup_distance(s.state, *eq.infected, *eq.patched));
    }
  }
  const bool ok = worst_patched <= 1e-6 && worst_mixed <= 1e-6 && same_p && inside;
  return {ok, fmt("patched gap %.2e, mixed gap %.2e, P** == P*: %s, 0 < I** < 1 - P*: %s",
                  worst_patched, worst_mixed, same_p ? "yes" : "no", inside ? "yes" : "no")};
}

Outcome extinction_conditions_soundness() {
  Engine rng(808);
  int holds = 0, counterexamples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 7));
    const double hi = uniform(rng, 0.1, 1.0);
    const auto model = RateModel::linear(testing::random_network(n, rng, 0.02, hi));
    const auto c = extinction_conditions(model);
    if (!c.any()) continue;
    ++holds;
    const auto r = spectral_report(model);
    if (r.q1.value > 1e-9 || r.q2.value > 1e-9) ++counterexamples;
  }
  return {counterexamples == 0 && holds > 0,
          fmt("200 instances, %d satisfy a condition, %d counterexamples", holds, counterexamples)};
}

Outcome sweep_properties() {
  // Two rate regimes per topology: a balanced one that mixes extinction, patch
  // survival and unclassified instances, and a virus-dominated one.
  struct Block {
    const char* kind;
    double beta_max, delta_max;
  };
  const Block blocks[] = {{"scale-free", 0.28, 0.28},
                          {"scale-free", 0.5, 0.08},
                          {"small-world", 0.38, 0.38},
                          {"small-world", 0.7, 0.1}};
  int instances = 0, failures = 0, virus = 0, patch = 0, violations = 0;
  double worst_i = 0.0, worst_p = 0.0;
  int counts[5] = {};
  for (const auto& block : blocks) {
    ExperimentConfig cfg;
    cfg.topology.kind = block.kind;
    cfg.topology.n = 50;
    cfg.topology.seed = 909;
    cfg.ranges.beta = {0.01, block.beta_max};
    cfg.ranges.delta1 = cfg.ranges.delta2 = {0.01, block.delta_max};
    cfg.count = 12;
    cfg.seed = 910;
    cfg.horizon = 50.0;
    cfg.paths = 10000;
    cfg.grid = 200;
    cfg.keep_trajectories = false;
    const auto report = run_sweep(cfg);
    instances += static_cast<int>(report.instances.size());
    failures += report.failures;
    virus += report.virus_extinction.instances;
    patch += report.patch_extinction.instances;
    violations += report.virus_extinction.violations + report.patch_extinction.violations;
    worst_i = std::max(worst_i, report.virus_extinction.worst);
    worst_p = std::max(worst_p, report.patch_extinction.worst);
    for (const auto& s : report.summaries) counts[static_cast<int>(s.collection)] += s.count;
  }
  const bool ok = instances >= 40 && failures == 0 && violations == 0 && virus > 0 && patch > 0;
  return {ok, fmt("%d instances, %d failed; (a) %d instances, worst sup I %.4f; (b) %d instances, "
                  "worst sup P %.4f; labels thm2/3/4/5/neither = %d/%d/%d/%d/%d",
                  instances, failures, virus, worst_i, patch, worst_p, counts[0], counts[1], counts[2],
                  counts[3], counts[4])};
}

Outcome determinism() {
  std::vector<std::string> broken;
  if (!(generate_scale_free(60, 2, {}, 5) == generate_scale_free(60, 2, {}, 5))) broken.push_back("scale-free");
  if (!(generate_small_world(60, 4, 0.1, {}, 5, {false}) == generate_small_world(60, 4, 0.1, {}, 5, {false})))
    broken.push_back("small-world");

  Engine rng(1001);
  const auto net = testing::random_network(6, rng, 0.2, 1.0);
  auto x0 = ChainState::susceptible(6);
  x0.digits[1] = kInfected;
  x0.digits[4] = kPatched;
  GillespieOptions opts;
  opts.paths = 4000;
  opts.seed = 1002;
  opts.threads = 1;
  const auto a = gillespie(net, x0, 20.0, opts);
  const auto b = gillespie(net, x0, 20.0, opts);
  opts.threads = 4;
  const auto c = gillespie(net, x0, 20.0, opts);
  opts.threads = 3;
  const auto d = gillespie(net, x0, 20.0, opts);
  for (const auto* other : {&b, &c, &d})
    if (!(other->average.infected == a.average.infected && other->average.patched == a.average.patched &&
          other->events == a.events))
      broken.push_back("gillespie");

  const auto model = RateModel(net, RateFamily::exp_saturating);
  const auto r1 = validate_conditions(model, 200, 3);
  const auto r2 = validate_conditions(model, 200, 3);
  if (r1.concavity.worst != r2.concavity.worst || r1.monotonicity.worst != r2.monotonicity.worst)
    broken.push_back("condition sampler");

  ExperimentConfig cfg;
  cfg.topology.n = 12;
  cfg.count = 3;
  cfg.horizon = 10.0;
  cfg.paths = 500;
  cfg.grid = 50;
  cfg.threads = 1;
  const auto s1 = run_sweep(cfg);
  cfg.threads = 3;
  const auto s2 = run_sweep(cfg);
  for (std::size_t k = 0; k < s1.instances.size(); ++k) {
    const auto& u = s1.instances[k];
    const auto& v = s2.instances[k];
    if (!(u.exact->infected == v.exact->infected && u.exact->patched == v.exact->patched &&
          u.infected_node == v.infected_node && u.s_q1 == v.s_q1 && u.dev.sup_patched == v.dev.sup_patched))
      broken.push_back("sweep");
  }
  std::string detail = "generators, Gillespie (1/3/4 threads), condition sampler, sweep (1/3 threads)";
  if (!broken.empty()) {
    detail = "differs:";
    for (const auto& name : broken) detail += " " + name;
  }
  return {broken.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 Gillespie averages match forward-equation marginals", oracle_equivalence},
      {"2 pairwise equations match finite-differenced marginals", pairwise_residual_check},
      {"3 spectral abscissa matches the characteristic-polynomial oracle", abscissa_oracle},
      {"4 extinction under column-sum conditions", extinction},
      {"5 infected attractor", infected_attractor},
      {"6 patched and mixed attractors", patched_and_mixed},
      {"7 sufficient extinction conditions are sound", extinction_conditions_soundness},
      {"8 sweep extinction properties at n = 50", sweep_properties},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %s: %s (%.1fs)\n", out.passed ? "PASS" : "FAIL", c.name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
