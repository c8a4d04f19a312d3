#include "sips/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sips/errors.hpp"
#include "sips/random.hpp"

namespace sips {

std::string to_string(RateFamily family) {
  switch (family) {
    case RateFamily::linear: return "linear";
    case RateFamily::exp_saturating: return "exp_saturating";
    case RateFamily::rational_saturating: return "rational_saturating";
  }
  return "unknown";
}

RateFamily parse_family(const std::string& name) {
  if (name == "linear") return RateFamily::linear;
  if (name == "exp_saturating") return RateFamily::exp_saturating;
  if (name == "rational_saturating") return RateFamily::rational_saturating;
  throw std::invalid_argument("unknown rate family '" + name + "'");
}

Saturation Saturation::uniform(int n, double level) {
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(n, level);
  return {v, v, v};
}

namespace {

void check_levels(RateFamily family, const Eigen::VectorXd& level, int n, const char* which) {
  if (level.size() != n)
    throw std::invalid_argument(std::string("saturation vector for ") + which + " has wrong size");
  for (int i = 0; i < n; ++i) {
    const bool ok = family == RateFamily::exp_saturating ? level[i] > 0.0 : level[i] >= 0.0;
    if (!ok || !std::isfinite(level[i]))
      throw std::invalid_argument(std::string("saturation parameter for ") + which +
                                  " out of range at node " + std::to_string(i));
  }
}

}  // namespace

RateModel::RateModel(RateNetwork net, RateFamily family, Saturation saturation, bool tie_h_to_g)
    : net_(std::move(net)), family_(family), saturation_(std::move(saturation)) {
  const int n = net_.n;
  if (family_ != RateFamily::linear) {
    if (saturation_.f.size() == 0) saturation_.f = Eigen::VectorXd::Ones(n);
    if (saturation_.g.size() == 0) saturation_.g = Eigen::VectorXd::Ones(n);
    if (saturation_.h.size() == 0) saturation_.h = Eigen::VectorXd::Ones(n);
    check_levels(family_, saturation_.f, n, "f");
    check_levels(family_, saturation_.g, n, "g");
    check_levels(family_, saturation_.h, n, "h");
  }
  if (tie_h_to_g) {
    net_.delta2 = net_.delta1;
    saturation_.h = saturation_.g;
  }
  g_equals_h_ = net_.delta1 == net_.delta2 &&
                (family_ == RateFamily::linear || saturation_.g == saturation_.h);
}

Eigen::VectorXd RateModel::saturate(Eigen::VectorXd s, const Eigen::VectorXd& level) const {
  switch (family_) {
    case RateFamily::linear:
      break;
    case RateFamily::exp_saturating:
      for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = -level[i] * std::expm1(-s[i] / level[i]);
      break;
    case RateFamily::rational_saturating:
      for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = s[i] / (1.0 + level[i] * s[i]);
      break;
  }
  return s;
}

Eigen::VectorXd RateModel::f(const Eigen::VectorXd& infected) const {
  return saturate(net_.beta * infected, saturation_.f);
}

Eigen::VectorXd RateModel::g(const Eigen::VectorXd& patched) const {
  return saturate(net_.delta1 * patched, saturation_.g);
}

Eigen::VectorXd RateModel::h(const Eigen::VectorXd& patched) const {
  return saturate(net_.delta2 * patched, saturation_.h);
}

double RateModel::max_total_rate() const {
  const Eigen::VectorXd total = net_.beta.rowwise().sum() + net_.delta1.rowwise().sum() +
                                net_.delta2.rowwise().sum() + net_.gamma + net_.alpha;
  return total.maxCoeff();
}

RateValues eval_rates(const RateModel& model, const Eigen::VectorXd& infected,
                      const Eigen::VectorXd& patched, double omega_tol) {
  const int n = model.n();
  if (infected.size() != n || patched.size() != n)
    throw std::invalid_argument("state vectors must have length n");
  for (int i = 0; i < n; ++i)
    if (infected[i] < -omega_tol || patched[i] < -omega_tol ||
        infected[i] + patched[i] > 1.0 + omega_tol)
      throw InvariantError("state outside Omega at node " + std::to_string(i));
  return {model.f(infected), model.g(patched), model.h(patched)};
}

// ---------------------------------------------------------------------------

namespace {

void worsen(ConditionResult& r, double violation, double tol) {
  if (!(violation <= r.worst)) r.worst = violation;  // NaN propagates as a failure
  if (!(violation <= tol)) r.passed = false;
}

// Indices to probe: all of 0..n-1 when n <= limit, else `limit` random ones.
std::vector<int> probe_indices(int n, int limit, Engine& rng) {
  std::vector<int> idx;
  if (n <= limit) {
    for (int j = 0; j < n; ++j) idx.push_back(j);
  } else {
    for (int k = 0; k < limit; ++k) idx.push_back(static_cast<int>(uniform_index(rng, n)));
  }
  return idx;
}

}  // namespace

ConditionReport check_rate_conditions(const std::vector<RateComponent>& components, int n,
                                      int sample_count, std::uint64_t seed,
                                      const ConditionTolerances& tol) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  constexpr double kGradStep = 1e-5;
  constexpr double kHessStep = 1e-3;
  constexpr int kCoordLimit = 16;
  constexpr int kPairLimit = 8;  // all pairs up to this order, 16 random pairs beyond

  ConditionReport report;
  Engine rng(seed);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);

  for (const auto& comp : components) {
    const Eigen::VectorXd at_zero = comp.eval(zero);
    worsen(report.nullity, at_zero.cwiseAbs().maxCoeff(), tol.nullity);
    worsen(report.smoothness, at_zero.allFinite() ? 0.0 : 1.0, 0.0);
  }

  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = uniform(rng, kHessStep, 1.0 - kHessStep);

    for (const auto& comp : components) {
      const Eigen::VectorXd fx = comp.eval(x);
      worsen(report.smoothness, fx.allFinite() ? 0.0 : 1.0, 0.0);
      worsen(report.nonnegative, std::max(0.0, -fx.minCoeff()), 0.0);

      for (int j : probe_indices(n, kCoordLimit, rng)) {
        Eigen::VectorXd up = x, down = x;
        up[j] += kGradStep;
        down[j] -= kGradStep;
        const Eigen::VectorXd grad = (comp.eval(up) - comp.eval(down)) / (2.0 * kGradStep);
        worsen(report.smoothness, grad.allFinite() ? 0.0 : 1.0, 0.0);
        for (int i = 0; i < n; ++i) {
          if (comp.support(i, j) > 0.0)
            worsen(report.monotonicity, -grad[i], tol.gradient);
          else
            worsen(report.proximity, std::abs(grad[i]), tol.gradient);
        }
      }

      std::vector<std::pair<int, int>> pairs;
      if (n <= kPairLimit) {
        for (int j = 0; j < n; ++j)
          for (int k = j; k < n; ++k) pairs.emplace_back(j, k);
      } else {
        for (int p = 0; p < 2 * kPairLimit; ++p)
          pairs.emplace_back(static_cast<int>(uniform_index(rng, n)),
                             static_cast<int>(uniform_index(rng, n)));
      }
      const double h = kHessStep;
      for (auto [j, k] : pairs) {
        Eigen::VectorXd second;
        if (j == k) {
          Eigen::VectorXd up = x, down = x;
          up[j] += h;
          down[j] -= h;
          second = (comp.eval(up) - 2.0 * fx + comp.eval(down)) / (h * h);
        } else {
          Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
          pp[j] += h, pp[k] += h;
          pm[j] += h, pm[k] -= h;
          mp[j] -= h, mp[k] += h;
          mm[j] -= h, mm[k] -= h;
          second = (comp.eval(pp) - comp.eval(pm) - comp.eval(mp) + comp.eval(mm)) / (4.0 * h * h);
        }
        worsen(report.smoothness, second.allFinite() ? 0.0 : 1.0, 0.0);
        worsen(report.concavity, second.maxCoeff(), tol.hessian);
      }
    }
  }
  return report;
}

std::vector<RateComponent> rate_components(const RateModel& model) {
  const auto& net = model.net();
  return {
      {"f", [&model](const Eigen::VectorXd& x) { return model.f(x); }, net.beta},
      {"g", [&model](const Eigen::VectorXd& x) { return model.g(x); }, net.delta1},
      {"h", [&model](const Eigen::VectorXd& x) { return model.h(x); }, net.delta2},
  };
}

ConditionReport validate_conditions(const RateModel& model, int sample_count, std::uint64_t seed,
                                    const ConditionTolerances& tol) {
  return check_rate_conditions(rate_components(model), model.n(), sample_count, seed, tol);
}

RateOrdering sampled_ordering(const RateModel& model, int sample_count, std::uint64_t seed,
                              double tol) {
  RateOrdering order;
  if (model.g_equals_h()) return order;
  Engine rng(seed);
  Eigen::VectorXd x(model.n());
  for (int s = 0; s < sample_count && (order.g_ge_h || order.g_le_h); ++s) {
    for (int j = 0; j < model.n(); ++j) x[j] = uniform01(rng);
    const Eigen::VectorXd diff = model.g(x) - model.h(x);
    if (diff.minCoeff() < -tol) order.g_ge_h = false;
    if (diff.maxCoeff() > tol) order.g_le_h = false;
  }
  return order;
}

QMatrices q_matrices(const RateModel& model) {
  const auto& net = model.net();
  // Every built-in family has unit slope at zero pressure, so df/dx(0) = M_beta etc.
  const Eigen::MatrixXd d_gamma = net.gamma.asDiagonal();
  const Eigen::MatrixXd d_alpha = net.alpha.asDiagonal();
  QMatrices q;
  q.q1 = net.beta - d_gamma;
  q.q2 = net.delta1 - d_alpha;
  q.q3 = net.delta2 - d_alpha;
  q.q4 = net.delta1.cwiseMax(net.delta2) - d_alpha;
  return q;
}

}  // namespace sips
