#include "sips/spectral.hpp"

namespace sips {

SpectralReport spectral_report(const RateModel& model, const PowerOptions& opts) {
  const auto q = q_matrices(model);
  SpectralReport report;
  report.q1 = spectral_abscissa(q.q1, opts);
  report.q2 = spectral_abscissa(q.q2, opts);
  report.q3 = spectral_abscissa(q.q3, opts);
  report.q4 = spectral_abscissa(q.q4, opts);
  return report;
}

Eigen::MatrixXd mixed_criterion_matrix(const RateModel& model, const Eigen::VectorXd& p_star) {
  const auto q = q_matrices(model);
  const Eigen::MatrixXd jac_f = q.q1 + Eigen::MatrixXd(model.net().gamma.asDiagonal());
  return q.q1 - jac_f * p_star.asDiagonal() - Eigen::MatrixXd(model.g(p_star).asDiagonal());
}

ExtinctionConditions extinction_conditions(const RateModel& model, const PowerOptions& opts) {
  const auto& net = model.net();
  const auto q = q_matrices(model);
  const Eigen::VectorXd inv_gamma = net.gamma.cwiseInverse();
  const Eigen::VectorXd inv_alpha = net.alpha.cwiseInverse();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(net.n, net.n);

  // Q D^-1 + E has a zero diagonal up to rounding; clamp so it is exactly nonnegative.
  const Eigen::MatrixXd a1 = (q.q1 * inv_gamma.asDiagonal() + id).cwiseMax(0.0);
  const Eigen::MatrixXd a2 = (q.q2 * inv_alpha.asDiagonal() + id).cwiseMax(0.0);

  ExtinctionConditions c;
  c.a = spectral_radius(a1, opts) < 1.0 && spectral_radius(a2, opts) < 1.0;
  c.b = spectral_radius(net.beta * inv_gamma.asDiagonal(), opts) < 1.0 &&
        spectral_radius(net.delta1 * inv_alpha.asDiagonal(), opts) < 1.0;
  c.c = (net.beta.colwise().sum().transpose().array() < net.gamma.array()).all() &&
        (net.delta1.colwise().sum().transpose().array() < net.alpha.array()).all();
  c.d = ((net.beta * inv_gamma).array() < 1.0).all() &&
        ((net.delta1 * inv_alpha).array() < 1.0).all();
  return c;
}

InfectedConditions infected_conditions(const RateOrdering& ordering, double s_q1, double s_q2, double s_q3,
                             const SignOptions& sign) {
  const bool virus_survives = s_q1 > sign.zero_tol;
  return {ordering.g_ge_h && virus_survives && s_q2 <= sign.zero_tol,
          ordering.g_le_h && virus_survives && s_q3 <= sign.zero_tol};
}

InfectedConditions infected_conditions(const RateModel& model, const SpectralReport& report,
                             int sample_count, std::uint64_t seed, const SignOptions& sign) {
  return infected_conditions(sampled_ordering(model, sample_count, seed), report.q1.value,
                           report.q2.value, report.q3.value, sign);
}

}  // namespace sips
