#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "plab/equilibria.hpp"
#include "plab/inclusion.hpp"
#include "test_util.hpp"

using namespace plab;
using plab::testing::random_above;
using plab::testing::random_function;
using plab::testing::random_with_zeros;

namespace {

const std::vector<SelectionPolicy> kAllPolicies{SelectionPolicy::upper(), SelectionPolicy::lower(),
                                                SelectionPolicy::zero(),
                                                SelectionPolicy::random_switch(99)};

// Dense Gaussian elimination with partial pivoting; independent of the Thomas solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

CoefficientProfile random_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double b0 = 0.5 + u01(rng);
  const double b1 = b0 + u01(rng);
  const double w1 = 4.0 * u01(rng);
  std::vector<Knot> bk, wk;
  for (int k = 0; k < 6; ++k) {
    bk.push_back({-1.0 + 0.4 * k, b0 + (b1 - b0) * u01(rng)});
    wk.push_back({-1.0 + 0.4 * k, w1 * u01(rng)});
  }
  return CoefficientProfile(Table{bk}, Table{wk}, b0, b1, 0.0, w1);
}

}  // namespace

TEST(HeavisideSelect, OffZeroValuesAreForced) {
  GridSpec s(2);
  const GridFunction u(s, {0.3, -0.2});
  for (const auto& p : kAllPolicies) {
    EXPECT_EQ(heaviside_select(u, p), GridFunction(s, {1, -1})) << p.name();
  }
}

TEST(HeavisideSelect, TieBreakingAtZero) {
  GridSpec s(1);
  const GridFunction u(s, {0.0});
  EXPECT_EQ(heaviside_select(u, SelectionPolicy::upper())[0], 1.0);
  EXPECT_EQ(heaviside_select(u, SelectionPolicy::lower())[0], -1.0);
  EXPECT_EQ(heaviside_select(u, SelectionPolicy::zero())[0], 0.0);
}

TEST(HeavisideSelect, RandomSwitchIsDeterministic) {
  GridSpec s(2);
  const GridFunction u(s, {0.0, 0.5});
  const auto p = SelectionPolicy::random_switch(1234);
  const auto first = heaviside_select(u, p, 17);
  for (int k = 0; k < 10; ++k) {
    const auto again = heaviside_select(u, p, 17);
    EXPECT_EQ(again[0], first[0]);
    EXPECT_EQ(again[1], 1.0);
  }
}

TEST(HeavisideSelect, RandomSwitchCoversSegment) {
  GridSpec s(300);
  const GridFunction zero(s);
  const auto f = heaviside_select(zero, SelectionPolicy::random_switch(5), 0);
  int counts[3] = {0, 0, 0};
  for (double v : f.values()) counts[static_cast<int>(v) + 1]++;
  for (int c : counts) EXPECT_GT(c, 60);
}

TEST(HeavisideSelect, AdmissibleForRandomInputs) {
  std::mt19937_64 rng(8);
  GridSpec s(25);
  for (int k = 0; k < 200; ++k) {
    const auto u = random_with_zeros(rng, s);
    for (const auto& p : kAllPolicies) {
      const auto f = heaviside_select(u, p, k);
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > 0) {
          EXPECT_EQ(f[i], 1.0);
        } else if (u[i] < 0) {
          EXPECT_EQ(f[i], -1.0);
        } else {
          EXPECT_GE(f[i], -1.0);
          EXPECT_LE(f[i], 1.0);
        }
      }
    }
  }
}

TEST(HeavisideSelect, FlippedPolicyIsMirrorImage) {
  std::mt19937_64 rng(9);
  GridSpec s(40);
  for (int k = 0; k < 50; ++k) {
    const auto u = random_with_zeros(rng, s);
    for (const auto& p : kAllPolicies) {
      EXPECT_EQ(heaviside_select(-u, p.flipped(), k), -heaviside_select(u, p, k)) << p.name();
      EXPECT_EQ(p.flipped().flipped(), p);
    }
  }
}

TEST(ParsePolicy, Names) {
  EXPECT_EQ(parse_policy("upper", 0), SelectionPolicy::upper());
  EXPECT_EQ(parse_policy("random_switch", 7), SelectionPolicy::random_switch(7));
  EXPECT_EQ(parse_policy("random_switch(12)", 7), SelectionPolicy::random_switch(12));
  EXPECT_THROW(parse_policy("middle", 0), UsageError);
  EXPECT_THROW(parse_policy("random_switch(x)", 0), UsageError);
}

TEST(Step, ZeroStaysZeroUnderZeroPolicy) {
  GridSpec s(7);
  CoefficientProfile p(Constant{1.3}, Constant{2.0}, 1.0, 2.0, 0.0, 2.0);
  EXPECT_EQ(step(GridFunction(s), 0.0, 0.01, p, SelectionPolicy::zero()), GridFunction(s));
}

TEST(Step, OneNodeHandSolves) {
  GridSpec s(1);
  // Pure diffusion: (1 + 2·0.1·4)·u' = 1.
  CoefficientProfile heat(Constant{1e-300}, Constant{0.0}, 1e-300, 1e-300, 0.0, 0.0);
  EXPECT_NEAR(step(GridFunction(s, {1.0}), 0.0, 0.1, heat, SelectionPolicy::upper())[0], 1.0 / 1.8,
              1e-16);
  const auto forced = CoefficientProfile::constant(1.0, 0.0);
  EXPECT_NEAR(step(GridFunction(s, {0.0}), 0.0, 0.1, forced, SelectionPolicy::upper())[0],
              0.1 / 1.8, 1e-16);
  EXPECT_NEAR(step(GridFunction(s, {0.0}), 0.0, 0.1, forced, SelectionPolicy::upper())[0],
              0.0555555555555556, 1e-15);
}

TEST(Step, MatchesDenseSolve) {
  std::mt19937_64 rng(4);
  GridSpec s(12);
  const double h = s.h();
  const double dt = 0.01;
  for (int k = 0; k < 40; ++k) {
    const auto profile = random_profile(rng);
    const auto u = random_with_zeros(rng, s, 2.0);
    const double t = -1.0 + 0.05 * k;
    for (const auto& p : kAllPolicies) {
      const auto c = profile.eval(t + dt);
      const Scheme scheme(profile, s, dt);
      const auto f = heaviside_select(u, p, scheme.step_key(t));
      std::vector<std::vector<double>> a(s.n_interior(), std::vector<double>(s.n_interior(), 0.0));
      std::vector<double> rhs(s.n_interior());
      for (std::size_t i = 0; i < s.n_interior(); ++i) {
        a[i][i] = 1.0 + 2.0 * dt / (h * h) - dt * c.omega;
        if (i > 0) a[i][i - 1] = -dt / (h * h);
        if (i + 1 < s.n_interior()) a[i][i + 1] = -dt / (h * h);
        rhs[i] = u[i] + dt * c.b * f[i];
      }
      const auto expected = dense_solve(a, rhs);
      const auto got = scheme.step(u, t, p);
      for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-13);
    }
  }
}

TEST(Step, RejectsInvalidProfile) {
  GridSpec s(1);
  EXPECT_THROW(step(GridFunction(s), 0.0, 0.5, CoefficientProfile::constant(1.0, 4.0),
                    SelectionPolicy::upper()),
               ValidationError);
}

TEST(Integrate, DegenerateIntervalIsSingleState) {
  GridSpec s(5);
  const GridFunction x(s, {1, 2, 3, 4, 5});
  const auto tr = integrate(x, 2.0, 2.0, 0.1, CoefficientProfile::constant(1, 0),
                            SelectionPolicy::upper());
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.final_state(), x);
}

TEST(Integrate, AdjustsDtToDivideInterval) {
  GridSpec s(3);
  const auto tr = integrate(GridFunction(s), 0.0, 1.0, 0.3, CoefficientProfile::constant(1, 0),
                            SelectionPolicy::upper());
  EXPECT_EQ(tr.size(), 5u);
  EXPECT_DOUBLE_EQ(tr.dt(), 0.25);
  EXPECT_EQ(tr.requested_dt(), 0.3);
  const auto tr2 = integrate(GridFunction(s), 0.0, 1.0, 0.1, CoefficientProfile::constant(1, 0),
                             SelectionPolicy::upper());
  EXPECT_EQ(tr2.size(), 11u);
}

TEST(Integrate, DiscreteEquilibriumIsStationary) {
  GridSpec s(31);
  const EquilibriumParams params{1.7, 3.0};
  const auto eq = discrete_equilibrium(params, s);
  const auto tr = integrate(eq, 0.0, 2.0, 1e-3, CoefficientProfile::constant(params.b, params.omega),
                            SelectionPolicy::upper());
  for (const auto& u : tr.states()) EXPECT_LE(sup_distance(u, eq), 1e-12);
}

TEST(Integrate, ZeroTrajectory) {
  GridSpec s(9);
  const auto tr = integrate(GridFunction(s), 0.0, 1.0, 0.01, CoefficientProfile::constant(1, 0),
                            SelectionPolicy::zero());
  for (const auto& u : tr.states()) EXPECT_EQ(u, GridFunction(s));
}

TEST(Integrate, SatisfiesOneStepIdentity) {
  std::mt19937_64 rng(12);
  GridSpec s(20);
  for (const auto& p : kAllPolicies) {
    const auto tr = integrate(random_with_zeros(rng, s), -1.0, 1.0, 0.01, random_profile(rng), p);
    EXPECT_LE(scheme_residual(tr), 1e-12);
  }
}

TEST(Integrate, TranslationIsExact) {
  std::mt19937_64 rng(13);
  GridSpec s(15);
  for (int k = 0; k < 10; ++k) {
    const auto profile = random_profile(rng);
    const auto x = random_with_zeros(rng, s);
    for (const auto& p : kAllPolicies) {
      const auto full = integrate(x, -1.0, 1.0, 0.01, profile, p);
      const std::size_t cut = 37 + 5 * k;
      const Scheme scheme(profile, s, full.dt());
      const auto tail = integrate_steps(full.states()[cut], full.times()[cut], full.size() - 1 - cut,
                                        scheme, p);
      ASSERT_EQ(tail.size(), full.size() - cut);
      for (std::size_t j = 0; j < tail.size(); ++j) {
        EXPECT_EQ(tail.states()[j], full.states()[cut + j]);
        EXPECT_EQ(tail.times()[j], full.times()[cut + j]);
      }
    }
  }
}

TEST(Concatenate, SplitRunsRejoinBitIdentically) {
  std::mt19937_64 rng(14);
  GridSpec s(15);
  const auto profile = random_profile(rng);
  const auto x = random_with_zeros(rng, s);
  for (const auto& p : kAllPolicies) {
    const auto whole = integrate(x, -1.0, 1.0, 0.01, profile, p);
    const Scheme scheme(profile, s, whole.dt());
    const auto phi = integrate_steps(x, -1.0, 100, scheme, p);
    const auto psi = integrate_steps(phi.final_state(), phi.final_time(), 100, scheme, p);
    const auto joined = concatenate(phi, psi);
    EXPECT_EQ(joined, whole) << p.name();
  }
}

TEST(Concatenate, MismatchedJunctionsRejected) {
  GridSpec s(4);
  const auto profile = CoefficientProfile::constant(1, 0);
  const Scheme scheme(profile, s, 0.1);
  const auto phi = integrate_steps(GridFunction::constant(s, 1.0), 0.0, 3, scheme,
                                   SelectionPolicy::upper());
  const auto wrong_state = integrate_steps(GridFunction::constant(s, 2.0), phi.final_time(), 3,
                                           scheme, SelectionPolicy::upper());
  EXPECT_THROW(concatenate(phi, wrong_state), UsageError);
  const auto wrong_time = integrate_steps(phi.final_state(), phi.final_time() + 0.1, 3, scheme,
                                          SelectionPolicy::upper());
  EXPECT_THROW(concatenate(phi, wrong_time), UsageError);
  const auto wrong_dt = integrate_steps(phi.final_state(), phi.final_time(), 3,
                                        Scheme(profile, s, 0.05), SelectionPolicy::upper());
  EXPECT_THROW(concatenate(phi, wrong_dt), UsageError);
  const auto wrong_grid = integrate_steps(GridFunction(GridSpec(5)), phi.final_time(), 3,
                                          Scheme(profile, GridSpec(5), 0.1),
                                          SelectionPolicy::upper());
  EXPECT_THROW(concatenate(phi, wrong_grid), UsageError);
}

TEST(Concatenate, ZeroWithZero) {
  GridSpec s(4);
  const Scheme scheme(CoefficientProfile::constant(1, 0), s, 0.1);
  const auto a = integrate_steps(GridFunction(s), 0.0, 3, scheme, SelectionPolicy::zero());
  const auto b = integrate_steps(GridFunction(s), a.final_time(), 4, scheme, SelectionPolicy::zero());
  const auto c = concatenate(a, b);
  EXPECT_EQ(c.size(), 8u);
  for (const auto& u : c.states()) EXPECT_EQ(u, GridFunction(s));
}

TEST(Concatenate, MixedPoliciesKeepSegments) {
  GridSpec s(4);
  const Scheme scheme(CoefficientProfile::constant(1, 0), s, 0.1);
  const auto a = integrate_steps(GridFunction(s), 0.0, 3, scheme, SelectionPolicy::upper());
  const auto b = integrate_steps(a.final_state(), a.final_time(), 2, scheme, SelectionPolicy::lower());
  const auto c = concatenate(a, b);
  ASSERT_EQ(c.segments().size(), 2u);
  EXPECT_EQ(c.segments()[1].first_step, 3u);
  EXPECT_LE(scheme_residual(c), 1e-14);
}

TEST(Attainability, PositiveDataGivesSingleton) {
  GridSpec s(31);
  const EquilibriumParams params{1.0, 2.0};
  const auto x = positive_equilibrium_closed_form(params, s);
  const auto sample = attainability_set(x, 0.0, 1.0, 1e-3,
                                        CoefficientProfile::constant(params.b, params.omega),
                                        kAllPolicies);
  EXPECT_EQ(sample.endpoints.size(), 1u);
  EXPECT_EQ(sample.policies_used.size(), 4u);
}

TEST(Attainability, ZeroDatumOneStep) {
  GridSpec s(1);
  const std::vector<SelectionPolicy> ps{SelectionPolicy::upper(), SelectionPolicy::lower(),
                                        SelectionPolicy::zero()};
  const auto sample = attainability_set(GridFunction(s), 0.0, 0.1, 0.1,
                                        CoefficientProfile::constant(1.0, 0.0), ps);
  ASSERT_EQ(sample.endpoints.size(), 3u);
  EXPECT_NEAR(sample.endpoints[0][0], 1.0 / 18.0, 1e-16);
  EXPECT_NEAR(sample.endpoints[1][0], -1.0 / 18.0, 1e-16);
  EXPECT_EQ(sample.endpoints[2][0], 0.0);
}

TEST(Attainability, DegenerateInterval) {
  GridSpec s(3);
  const GridFunction x(s, {0.1, 0, -0.1});
  const auto sample = attainability_set(x, 1.0, 1.0, 0.1, CoefficientProfile::constant(1, 0),
                                        kAllPolicies);
  ASSERT_EQ(sample.endpoints.size(), 1u);
  EXPECT_EQ(sample.endpoints[0], x);
  EXPECT_THROW(attainability_set(x, 1.0, 1.0, 0.1, CoefficientProfile::constant(1, 0), {}),
               UsageError);
}

TEST(Properties, StrongOrderPreservation) {
  std::mt19937_64 rng(31);
  GridSpec s(15);
  for (int k = 0; k < 30; ++k) {
    const auto profile = random_profile(rng);
    const auto x = random_with_zeros(rng, s);
    const auto y = random_above(rng, x);
    const Scheme scheme(profile, s, 1e-3);
    const auto lo_x = integrate_steps(x, -1.0, 300, scheme, SelectionPolicy::lower());
    const auto hi_y = integrate_steps(y, -1.0, 300, scheme, SelectionPolicy::upper());
    for (const auto& q : kAllPolicies) {
      const auto q_y = integrate_steps(y, -1.0, 300, scheme, q);
      const auto q_x = integrate_steps(x, -1.0, 300, scheme, q);
      for (std::size_t j = 0; j < q_y.size(); ++j) {
        for (std::size_t i = 0; i < s.n_interior(); ++i) {
          EXPECT_LE(lo_x.states()[j][i], q_y.states()[j][i] + 1e-13);
          EXPECT_LE(q_x.states()[j][i], hi_y.states()[j][i] + 1e-13);
        }
      }
    }
  }
}

TEST(Properties, OddSymmetryIsExact) {
  std::mt19937_64 rng(32);
  GridSpec s(15);
  for (int k = 0; k < 10; ++k) {
    const auto profile = random_profile(rng);
    const auto x = random_with_zeros(rng, s);
    const Scheme scheme(profile, s, 1e-3);
    for (const auto& p : kAllPolicies) {
      const auto a = integrate_steps(x, -1.0, 500, scheme, p);
      const auto b = integrate_steps(-x, -1.0, 500, scheme, p.flipped());
      for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(b.states()[j], -a.states()[j]);
    }
  }
}

TEST(Properties, BoundedOverLongHorizon) {
  std::mt19937_64 rng(33);
  GridSpec s(31);
  const double radius = 10.0;
  for (int k = 0; k < 5; ++k) {
    const auto profile = random_profile(rng);
    const double bound =
        std::max(radius, profile.b1() / (discrete_first_eigenvalue(s) - profile.omega1()));
    const auto x = random_function(rng, s, radius);
    for (const auto& p : kAllPolicies) {
      const auto tr = integrate_steps(x, -1.0, 1000, Scheme(profile, s, 1e-2), p);
      for (const auto& u : tr.states()) EXPECT_LE(sup_norm(u), 2.0 * bound);
    }
  }
}
