#include <doctest.h>

#include <cmath>

#include "sips/dynamics.hpp"
#include "sips/equilibria.hpp"
#include "sips/errors.hpp"
#include "test_util.hpp"

using namespace sips;

namespace {

double derivative_norm(const RateModel& model, const Eigen::VectorXd& infected,
                       const Eigen::VectorXd& patched) {
  return derivative(model, {infected, patched}).cwiseAbs().maxCoeff();
}

// Scalar oracle for the symmetric pair: iterate x <- b x / (c + b x) from 1.
double scalar_fixed_point(double b, double c) {
  double x = 1.0;
  for (int k = 0; k < 100000; ++k) x = b * x / (c + b * x);
  return x;
}

}  // namespace

TEST_CASE("infected equilibrium of the symmetric pair") {
  const auto model = RateModel::linear(testing::symmetric_pair(2, 0.4, 0.4));
  const auto eq = infected_equilibrium(model);
  REQUIRE(eq.infected);
  CHECK(eq.kind == EquilibriumKind::infected);
  CHECK((eq.infected->array() - 0.5).abs().maxCoeff() < 1e-12);
  CHECK(scalar_fixed_point(2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(derivative_norm(model, *eq.infected, *eq.patched) < 1e-8);

  for (double b : {1.5, 3.0, 7.0}) {
    const auto e = infected_equilibrium(RateModel::linear(testing::symmetric_pair(b, 0.4, 0.4)));
    CHECK((e.infected->array() - (1.0 - 1.0 / b)).abs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("threshold cases collapse") {
  CHECK_THROWS_AS(infected_equilibrium(RateModel::linear(testing::symmetric_pair(1, 0.4, 0.4))),
                  CollapseError);
  CHECK_THROWS_AS(infected_equilibrium(RateModel::linear(testing::symmetric_pair(0.5, 0.4, 0.4))),
                  CollapseError);
  CHECK_THROWS_AS(patched_equilibrium(RateModel::linear(testing::symmetric_pair(2, 1, 1))),
                  CollapseError);

  // Without the spectral pre-check the iteration itself reaches the floor below threshold.
  FixedPointOptions raw;
  raw.check_threshold = false;
  CHECK_THROWS_AS(infected_equilibrium(RateModel::linear(testing::symmetric_pair(0.5, 0.4, 0.4)), raw),
                  CollapseError);
}

TEST_CASE("patched equilibrium of the symmetric pair") {
  const auto model = RateModel::linear(testing::symmetric_pair(0.4, 2, 2));
  const auto eq = patched_equilibrium(model);
  CHECK((eq.patched->array() - 0.5).abs().maxCoeff() < 1e-12);
  CHECK(eq.infected->cwiseAbs().maxCoeff() == 0.0);
  CHECK(derivative_norm(model, *eq.infected, *eq.patched) < 1e-8);
}

TEST_CASE("mixed equilibrium") {
  SUBCASE("symmetric pair with a positive criterion") {
    const auto model = RateModel::linear(testing::symmetric_pair(6, 2, 2), true);
    const auto eq = mixed_equilibrium(model);
    CHECK((eq.patched->array() - 0.5).abs().maxCoeff() < 1e-12);
    CHECK((eq.infected->array() - 1.0 / 6.0).abs().maxCoeff() < 1e-12);
    // One-dimensional oracle: I = 0.5 * 6 I / (1 + 6 I + 1).
    double x = 1.0;
    for (int k = 0; k < 10000; ++k) x = 0.5 * 6.0 * x / (1.0 + 6.0 * x + 1.0);
    CHECK(x == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(derivative_norm(model, *eq.infected, *eq.patched) < 1e-8);
    CHECK(*eq.patched == *patched_equilibrium(model).patched);
  }
  SUBCASE("zero criterion has no mixed equilibrium") {
    const auto model = RateModel::linear(testing::symmetric_pair(4, 2, 2), true);
    CHECK_THROWS_AS(mixed_equilibrium(model), CollapseError);
    CHECK(classify(model).predicted == Regime::unclassified);
  }
  SUBCASE("different g and h are rejected") {
    CHECK_THROWS_AS(mixed_equilibrium(RateModel::linear(testing::symmetric_pair(6, 2, 1))),
                    InvariantError);
  }
  SUBCASE("random instances stay strictly inside") {
    sips::Engine rng(41);
    int accepted = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + static_cast<int>(uniform_index(rng, 5));
      const auto model = RateModel::linear(testing::random_network(n, rng, 0.3, 3.0), true);
      Eigen::VectorXd infected, patched;
      try {
        const auto eq = mixed_equilibrium(model);
        infected = *eq.infected;
        patched = *eq.patched;
      } catch (const CollapseError&) {
        continue;
      }
      ++accepted;
      CHECK(infected.minCoeff() > 0.0);
      CHECK(((1.0 - patched.array()) - infected.array()).minCoeff() > 0.0);
      CHECK(derivative_norm(model, infected, patched) < 1e-8);
    }
    CHECK(accepted > 10);
  }
}

TEST_CASE("fixed point is unique") {
  sips::Engine rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 6));
    const auto model = RateModel::linear(testing::random_network(n, rng, 0.5, 2.0));
    const auto q1 = spectral_abscissa(q_matrices(model).q1);
    if (q1.value <= 1e-3) continue;
    const auto from_top = infected_equilibrium(model);
    FixedPointOptions low;
    low.start = Eigen::VectorXd(1e-3 * q1.perron_vector / q1.perron_vector.maxCoeff());
    const auto from_bottom = infected_equilibrium(model, low);
    CHECK((*from_top.infected - *from_bottom.infected).cwiseAbs().maxCoeff() < 10 * 1e-10);
  }
}

TEST_CASE("positive infected equilibrium exactly above threshold") {
  sips::Engine rng(43);
  int above = 0, below = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 5));
    const auto model = RateModel::linear(testing::random_network(n, rng, 0.1, 1.5));
    const double s = spectral_abscissa(q_matrices(model).q1).value;
    if (std::abs(s) < 1e-3) continue;
    FixedPointOptions raw;
    raw.check_threshold = false;
    bool positive = false;
    try {
      positive = infected_equilibrium(model, raw).infected->minCoeff() > 0.0;
    } catch (const CollapseError&) {
    }
    CHECK(positive == (s > 0));
    (s > 0 ? above : below)++;
  }
  CHECK(above > 5);
  CHECK(below > 5);
}

TEST_CASE("classification of the symmetric pair") {
  CHECK(classify(RateModel::linear(testing::symmetric_pair(0.4, 0.4, 0.4))).predicted ==
        Regime::susceptible_attractor);

  const auto infected = classify(RateModel::linear(testing::symmetric_pair(2, 0.4, 0.4)));
  CHECK(infected.predicted == Regime::infected_attractor);
  CHECK(infected.spectral.q1.value == doctest::Approx(1.0));
  CHECK(infected.spectral.q4.value == doctest::Approx(-0.6));
  CHECK(*infected.infected_star == doctest::Approx(0.5));

  const auto patched = classify(RateModel::linear(testing::symmetric_pair(0.4, 2, 2)));
  CHECK(patched.predicted == Regime::patched_attractor);
  CHECK(*patched.patched_star == doctest::Approx(0.5));

  const auto mixed = classify(RateModel::linear(testing::symmetric_pair(6, 2, 2), true));
  CHECK(mixed.predicted == Regime::mixed_attractor);
  REQUIRE(mixed.spectral.mixed);
  CHECK(mixed.spectral.mixed->value == doctest::Approx(1.0));
  CHECK(*mixed.infected_mixed == doctest::Approx(1.0 / 6.0));

  // Both grow but patches dominate neither criterion: g != h leaves it unclassified.
  CHECK(classify(RateModel::linear(testing::symmetric_pair(6, 2, 1.5))).predicted == Regime::unclassified);
}

TEST_CASE("predicted regime matches the long-run ODE limit") {
  sips::Engine rng(44);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 4));
    const bool tie = trial % 2 == 0;
    const auto model = RateModel::linear(testing::random_network(n, rng, 0.1, 2.0), tie);
    const auto report = classify(model);
    if (report.predicted == Regime::unclassified) continue;
    const double s = std::min(std::abs(report.spectral.q1.value), std::abs(report.spectral.q2.value));
    if (s < 0.05) continue;  // slow approach near a threshold
    auto x0 = PopulationState::zeros(n);
    for (int i = 0; i < n; ++i) {
      x0.infected[i] = uniform(rng, 0.1, 0.5);
      x0.patched[i] = uniform(rng, 0.1, 0.45);
    }
    const auto limit = steady_state(model, x0, {1e-10, 1e5});
    REQUIRE(limit.converged);
    REQUIRE(report.equilibrium);
    const auto& eq = *report.equilibrium;
    CHECK((limit.state.infected - *eq.infected).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((limit.state.patched - *eq.patched).cwiseAbs().maxCoeff() < 1e-4);
    ++checked;
  }
  CHECK(checked > 15);
}
