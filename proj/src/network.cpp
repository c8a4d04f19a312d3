#include "sips/network.hpp"

#include <cmath>
#include <sstream>

#include "sips/errors.hpp"
#include "sips/graph.hpp"

namespace sips {

RateNetwork RateNetwork::zeros(int n) {
  RateNetwork net;
  net.n = n;
  net.beta = Eigen::MatrixXd::Zero(n, n);
  net.delta1 = Eigen::MatrixXd::Zero(n, n);
  net.delta2 = Eigen::MatrixXd::Zero(n, n);
  net.gamma = Eigen::VectorXd::Zero(n);
  net.alpha = Eigen::VectorXd::Zero(n);
  return net;
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const ValidationCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no validation check named '" + name + "'");
}

namespace {

std::string entry(const char* name, int i, int j, double v) {
  std::ostringstream os;
  os << name << "[" << i << "][" << j << "] = " << v;
  return os.str();
}

std::string entry(const char* name, int i, double v) {
  std::ostringstream os;
  os << name << "[" << i << "] = " << v;
  return os.str();
}

ValidationCheck check_nonnegative(const RateNetwork& net) {
  ValidationCheck c{checks::kNonnegative, true, {}};
  const std::pair<const char*, const Eigen::MatrixXd*> mats[] = {
      {"beta", &net.beta}, {"delta1", &net.delta1}, {"delta2", &net.delta2}};
  for (const auto& [name, m] : mats)
    for (int i = 0; i < net.n; ++i)
      for (int j = 0; j < net.n; ++j) {
        const double v = (*m)(i, j);
        if (!std::isfinite(v) || v < 0.0) return {c.name, false, entry(name, i, j, v)};
      }
  return c;
}

ValidationCheck check_positive(const char* check, const char* name, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !(v[i] > 0.0)) return {check, false, entry(name, i, v[i])};
  return {check, true, {}};
}

}  // namespace

ValidationReport validate(const RateNetwork& net, const ValidateOptions& opts) {
  ValidationReport report;
  const int n = net.n;
  const bool shape_ok = n >= 1 && net.beta.rows() == n && net.beta.cols() == n &&
                        net.delta1.rows() == n && net.delta1.cols() == n &&
                        net.delta2.rows() == n && net.delta2.cols() == n &&
                        net.gamma.size() == n && net.alpha.size() == n;
  report.checks.push_back({checks::kShape, shape_ok,
                           shape_ok ? "" : "matrix/vector sizes do not match n"});
  if (!shape_ok) return report;

  report.checks.push_back(check_nonnegative(net));

  ValidationCheck support{checks::kSupport, true, {}};
  for (int i = 0; i < n && support.passed; ++i)
    for (int j = 0; j < n; ++j)
      if ((net.delta1(i, j) > 0.0) != (net.delta2(i, j) > 0.0)) {
        support = {support.name, false,
                   entry("delta1", i, j, net.delta1(i, j)) + " but " +
                       entry("delta2", i, j, net.delta2(i, j))};
        break;
      }
  report.checks.push_back(support);

  report.checks.push_back(check_positive(checks::kGamma, "gamma", net.gamma));
  report.checks.push_back(check_positive(checks::kAlpha, "alpha", net.alpha));

  ValidationCheck diag{checks::kDiagonal, true, {}};
  for (int i = 0; i < n; ++i) {
    if (net.beta(i, i) != 0.0) diag = {diag.name, false, entry("beta", i, i, net.beta(i, i))};
    else if (net.delta1(i, i) != 0.0)
      diag = {diag.name, false, entry("delta1", i, i, net.delta1(i, i))};
    else if (net.delta2(i, i) != 0.0)
      diag = {diag.name, false, entry("delta2", i, i, net.delta2(i, i))};
    if (!diag.passed) break;
  }
  report.checks.push_back(diag);

  if (opts.allow_reducible) {
    report.checks.push_back({checks::kVirusConnected, true, "skipped (allow_reducible)"});
    report.checks.push_back({checks::kPatchConnected, true, "skipped (allow_reducible)"});
  } else {
    const bool gv = is_strongly_connected(support_digraph(net.beta));
    const bool gp = is_strongly_connected(support_digraph(net.delta1));
    report.checks.push_back(
        {checks::kVirusConnected, gv, gv ? "" : "support digraph of beta is not strongly connected"});
    report.checks.push_back({checks::kPatchConnected, gp,
                             gp ? "" : "support digraph of delta1 is not strongly connected"});
  }
  return report;
}

void require_valid(const RateNetwork& net, const ValidateOptions& opts) {
  const auto report = validate(net, opts);
  if (const auto* bad = report.first_failure())
    throw InvariantError("invalid network: " + bad->name +
                         (bad->detail.empty() ? "" : " (" + bad->detail + ")"));
}

}  // namespace sips
