#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plab/equilibria.hpp"
#include "plab/inclusion.hpp"

using namespace plab;

namespace {

// Shooting oracle for -u'' = b + ω u, u(0) = 0, u(1) = 0, integrated with RK4.
// The problem is linear in the unknown slope, so two shots fix it exactly.
struct Shooting {
  double b, omega;

  std::pair<double, double> shoot(double slope, double x_end, int steps) const {
    double u = 0.0, v = slope;
    const double h = x_end / steps;
    auto f = [&](double uu) { return -b - omega * uu; };
    for (int k = 0; k < steps; ++k) {
      const double k1u = v, k1v = f(u);
      const double k2u = v + 0.5 * h * k1v, k2v = f(u + 0.5 * h * k1u);
      const double k3u = v + 0.5 * h * k2v, k3v = f(u + 0.5 * h * k2u);
      const double k4u = v + h * k3v, k4v = f(u + h * k3u);
      u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
      v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    return {u, v};
  }

  double value_at(double x) const {
    const int steps = 20000;
    const double e0 = shoot(0.0, 1.0, steps).first;
    const double e1 = shoot(1.0, 1.0, steps).first;
    const double slope = -e0 / (e1 - e0);
    if (x == 0.0) return 0.0;
    return shoot(slope, x, static_cast<int>(steps * x)).first;
  }
};

}  // namespace

TEST(ClosedForm, QuadraticMidpoint) {
  EXPECT_DOUBLE_EQ(positive_equilibrium_at({1.0, 0.0}, 0.5), 0.125);
  GridSpec s(63);
  EXPECT_DOUBLE_EQ(positive_equilibrium_closed_form({1.0, 0.0}, s)[31], 0.125);
}

TEST(ClosedForm, OmegaOneMidpointAgainstShooting) {
  const double expected = 1.0 / std::cos(0.5) - 1.0;
  EXPECT_NEAR(expected, 0.139494, 1e-6);
  EXPECT_NEAR(positive_equilibrium_at({1.0, 1.0}, 0.5), expected, 1e-15);
  const Shooting oracle{1.0, 1.0};
  EXPECT_NEAR(oracle.value_at(0.5), expected, 1e-12);
}

TEST(ClosedForm, MatchesShootingAcrossParameters) {
  for (double b : {0.5, 2.0}) {
    for (double w : {1e-9, 0.3, 4.0, 9.0}) {
      const Shooting oracle{b, w};
      for (double x : {0.1, 0.25, 0.5, 0.8}) {
        EXPECT_NEAR(positive_equilibrium_at({b, w}, x), oracle.value_at(x),
                    1e-10 * std::max(1.0, oracle.value_at(0.5)))
            << "b=" << b << " w=" << w << " x=" << x;
      }
    }
  }
}

TEST(ClosedForm, ContinuousResidualVanishes) {
  // Central second difference with h = 1e-4 has truncation error ~h²·u''''/12.
  for (double w : {0.0, 0.5, 4.0, 9.5}) {
    const EquilibriumParams p{1.3, w};
    const double h = 1e-4;
    for (double x : {0.05, 0.3, 0.5, 0.91}) {
      const double upp = (positive_equilibrium_at(p, x - h) - 2 * positive_equilibrium_at(p, x) +
                          positive_equilibrium_at(p, x + h)) /
                         (h * h);
      EXPECT_NEAR(-upp - w * positive_equilibrium_at(p, x) - p.b, 0.0, 1e-4);
    }
    EXPECT_NEAR(positive_equilibrium_at(p, 0.0), 0.0, 1e-16);
    EXPECT_NEAR(positive_equilibrium_at(p, 1.0), 0.0, 1e-15);
  }
}

TEST(ClosedForm, SmallOmegaMatchesFirstOrderExpansion) {
  // d/dω at ω = 0 solves -u'' = x(1-x)/2 with Dirichlet data:
  // u₁(x) = x⁴/24 - x³/12 + x/24, which is 0.0105875 at x = 0.3.
  const double x = 0.3;
  const double slope = x * x * x * x / 24 - x * x * x / 12 + x / 24;
  const double base = positive_equilibrium_at({1.0, 0.0}, x);
  EXPECT_GE(positive_equilibrium_at({1.0, 1e-14}, x), base);
  for (double w : {1e-10, 1e-7, 1e-5}) {
    const double v = positive_equilibrium_at({1.0, w}, x);
    EXPECT_NEAR((v - base) / w, slope, 1e-3 * slope) << "w=" << w;
  }
}

TEST(ClosedForm, NegativeIsMirror) {
  GridSpec s(10);
  const EquilibriumParams p{2.0, 3.0};
  EXPECT_EQ(negative_equilibrium_closed_form(p, s), -positive_equilibrium_closed_form(p, s));
}

TEST(ClosedForm, DomainErrors) {
  GridSpec s(10);
  EXPECT_THROW(positive_equilibrium_closed_form({1.0, 10.0}, s), UsageError);
  EXPECT_THROW(positive_equilibrium_closed_form({0.0, 1.0}, s), UsageError);
}

TEST(ClosedForm, MonotoneInParameters) {
  GridSpec s(31);
  for (double b = 0.5; b <= 3.0; b += 0.5) {
    for (double w = 0.0; w <= 9.0; w += 1.5) {
      const auto base = positive_equilibrium_closed_form({b, w}, s);
      EXPECT_TRUE(is_nondegenerate(base));
      EXPECT_TRUE(leq(base, positive_equilibrium_closed_form({b + 0.25, w}, s)));
      EXPECT_TRUE(leq(base, positive_equilibrium_closed_form({b, w + 0.5}, s)));
      EXPECT_TRUE(leq(discrete_equilibrium({b, w}, s), discrete_equilibrium({b, w + 0.5}, s)));
    }
  }
}

TEST(Discrete, OneNodeHandSolve) {
  EXPECT_DOUBLE_EQ(discrete_equilibrium({1.0, 0.0}, GridSpec(1))[0], 0.125);
}

TEST(Discrete, ExactOnQuadratics) {
  for (std::size_t n : {1u, 2u, 7u, 31u, 100u}) {
    GridSpec s(n);
    EXPECT_LE(sup_distance(discrete_equilibrium({1.0, 0.0}, s),
                           positive_equilibrium_closed_form({1.0, 0.0}, s)),
              1e-14);
  }
}

TEST(Discrete, IsStationaryUnderUpperPolicy) {
  GridSpec s(63);
  const EquilibriumParams p{1.4, 5.0};
  const auto eq = discrete_equilibrium(p, s);
  const auto next = step(eq, 0.0, 1e-3, CoefficientProfile::constant(p.b, p.omega),
                         SelectionPolicy::upper());
  EXPECT_LE(sup_distance(next, eq), 1e-12);
  EXPECT_LE(stationarity_residual(eq, p), 1e-9);
}

TEST(Discrete, RejectsOmegaAboveDiscreteEigenvalue) {
  EXPECT_THROW(discrete_equilibrium({1.0, 9.0}, GridSpec(1)), UsageError);
}

TEST(Discrete, SecondOrderConvergence) {
  const EquilibriumParams p{1.0, 4.0};
  double prev = 0.0;
  for (std::size_t n : {31u, 63u, 127u}) {
    GridSpec s(n);
    const double gap =
        sup_distance(discrete_equilibrium(p, s), positive_equilibrium_closed_form(p, s));
    if (prev > 0.0) {
      EXPECT_GE(prev / gap, 3.0);
      EXPECT_LE(prev / gap, 5.0);
    }
    prev = gap;
  }
}

TEST(Residual, QuadraticExactness) {
  for (std::size_t n : {7u, 31u, 63u}) {
    GridSpec s(n);
    EXPECT_LE(stationarity_residual(positive_equilibrium_closed_form({1.0, 0.0}, s), {1.0, 0.0}),
              1e-12);
  }
}

TEST(Residual, SecondOrderConsistency) {
  const EquilibriumParams p{1.0, 4.0};
  const double r63 = stationarity_residual(positive_equilibrium_closed_form(p, GridSpec(63)), p);
  const double r127 = stationarity_residual(positive_equilibrium_closed_form(p, GridSpec(127)), p);
  EXPECT_GE(r63 / r127, 3.0);
  EXPECT_LE(r63 / r127, 5.0);
}

TEST(Residual, RequiresPositiveState) {
  GridSpec s(3);
  EXPECT_THROW(stationarity_residual(GridFunction(s, {1, 0, 1}), {1.0, 0.0}), UsageError);
}
