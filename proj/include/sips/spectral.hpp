#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "sips/errors.hpp"
#include "sips/graph.hpp"
#include "sips/rates.hpp"

namespace sips {

struct PowerOptions {
  double tol = 1e-10;  // relative width of the Collatz-Wielandt bracket
  int max_iterations = 100000;
};

template <typename Scalar>
struct PerronResult {
  Scalar value{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vector;  // positive, max-normalized
  int iterations = 0;
  Scalar residual{};  // final bracket width max(Bx/x) - min(Bx/x)
};

/// Perron root of a primitive nonnegative matrix by power iteration from the
/// all-ones vector. For positive x, min_i (Bx)_i/x_i <= rho(B) <= max_i (Bx)_i/x_i,
/// and the iteration stops once that bracket is narrower than tol * rho.
template <typename Derived>
PerronResult<typename Derived::Scalar> perron_root(const Eigen::MatrixBase<Derived>& b,
                                                   const PowerOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = b;
  Vector x = Vector::Ones(m.rows());
  PerronResult<Scalar> out;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Vector y = m * x;
    const Vector ratio = y.cwiseQuotient(x);
    const Scalar lo = ratio.minCoeff();
    const Scalar hi = ratio.maxCoeff();
    const Scalar scale = y.maxCoeff();
    if (!(scale > Scalar(0)) || !std::isfinite(static_cast<double>(scale)))
      throw ConvergenceError("power iteration lost positivity (matrix not primitive?)");
    x = y / scale;
    out.iterations = it;
    out.residual = hi - lo;
    out.value = (hi + lo) / Scalar(2);
    if (hi - lo <= Scalar(opts.tol) * hi) {
      out.vector = x;
      return out;
    }
  }
  throw ConvergenceError("power iteration did not converge within " +
                         std::to_string(opts.max_iterations) + " iterations");
}

template <typename Derived>
bool is_metzler(const Eigen::MatrixBase<Derived>& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j && !(a(i, j) >= 0)) return false;
  return true;
}

template <typename Scalar>
struct AbscissaResult {
  Scalar value{};
  Scalar shift{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> perron_vector;
  int iterations = 0;
  Scalar residual{};
};

/// Spectral abscissa s(A) of an irreducible Metzler matrix, computed as
/// rho(A + shift I) - shift. The default shift max_i |A_ii| + 1 makes the shifted
/// matrix nonnegative with a positive diagonal, hence primitive. A caller-supplied
/// shift must keep every shifted diagonal entry positive.
template <typename Derived>
AbscissaResult<typename Derived::Scalar> spectral_abscissa(
    const Eigen::MatrixBase<Derived>& a, const PowerOptions& opts = {},
    std::optional<typename Derived::Scalar> shift = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix m = a;
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("spectral_abscissa: matrix must be square and non-empty");
  if (!is_metzler(m)) throw std::invalid_argument("spectral_abscissa: matrix is not Metzler");
  if (!is_irreducible(m.template cast<double>()) && m.rows() > 1)
    throw std::invalid_argument("spectral_abscissa: matrix is reducible");

  const Scalar sigma = shift ? *shift : m.diagonal().cwiseAbs().maxCoeff() + Scalar(1);
  if (!((m.diagonal().array() + sigma) > Scalar(0)).all())
    throw std::invalid_argument("spectral_abscissa: shift leaves a non-positive diagonal");

  const auto root = perron_root(m + sigma * Matrix::Identity(m.rows(), m.cols()), opts);
  return {root.value - sigma, sigma, root.vector, root.iterations, root.residual};
}

/// Spectral radius of a nonnegative matrix. Each irreducible diagonal block B of the
/// Frobenius normal form contributes rho(B + I) - 1 (primitive, so the power
/// iteration converges even for periodic blocks); trivial blocks contribute |b_ii|.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& a,
                                         const PowerOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix m = a;
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  if (!(m.array() >= Scalar(0)).all())
    throw std::invalid_argument("spectral_radius: matrix is not nonnegative");

  const auto comps = strongly_connected_components(support_digraph(m.template cast<double>()));
  Scalar best(0);
  for (int c = 0; c < comps.count; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (comps.label[i] == c) members.push_back(i);
    if (members.size() == 1) {
      best = std::max(best, Scalar(std::abs(m(members[0], members[0]))));
      continue;
    }
    const auto k = static_cast<Eigen::Index>(members.size());
    Matrix block(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index s = 0; s < k; ++s) block(r, s) = m(members[r], members[s]);
    const auto root = perron_root(block + Matrix::Identity(k, k), opts);
    best = std::max(best, root.value - Scalar(1));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Model-level reports

/// Sign convention used for threshold decisions: s <= zero_tol counts as s <= 0.
struct SignOptions {
  double zero_tol = 1e-9;
};

struct SpectralReport {
  AbscissaResult<double> q1, q2, q3, q4;
  /// s(Q1 - (Q1 + D_gamma) diag P* - diag g(P*)); present only when it applies
  /// (g == h and s(Q2) > 0), filled in by the equilibrium classifier.
  std::optional<AbscissaResult<double>> mixed;
};

SpectralReport spectral_report(const RateModel& model, const PowerOptions& opts = {});

/// Matrix of the mixed-equilibrium criterion for a given patched equilibrium P*.
Eigen::MatrixXd mixed_criterion_matrix(const RateModel& model, const Eigen::VectorXd& p_star);

/// Sufficient conditions for extinction of both viruses and patches.
struct ExtinctionConditions {
  bool a = false;  // rho(Q1 D_gamma^-1 + E) < 1 and rho(Q2 D_alpha^-1 + E) < 1
  bool b = false;  // rho(M_beta D_gamma^-1) < 1 and rho(M_delta1 D_alpha^-1) < 1
  bool c = false;  // column sums: sum_i beta_ij < gamma_j, sum_i delta1_ij < alpha_j
  bool d = false;  // row sums: sum_j beta_ij / gamma_j < 1, sum_j delta1_ij / alpha_j < 1

  bool any() const { return a || b || c || d; }
};

ExtinctionConditions extinction_conditions(const RateModel& model, const PowerOptions& opts = {});

/// Refinements of the infected-attractor criterion under an ordering of g and h.
struct InfectedConditions {
  bool a = false;  // g >= h, s(Q1) > 0, s(Q2) <= 0
  bool b = false;  // g <= h, s(Q1) > 0, s(Q3) <= 0
};

InfectedConditions infected_conditions(const RateOrdering& ordering, double s_q1, double s_q2, double s_q3,
                             const SignOptions& sign = {});

InfectedConditions infected_conditions(const RateModel& model, const SpectralReport& report,
                             int sample_count = 1000, std::uint64_t seed = 0,
                             const SignOptions& sign = {});

}  // namespace sips
