#pragma once

// Property suite behind `plab verify` and the acceptance binary. Each
// criterion reports the worst measured quantity against its threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plab/attractor.hpp"

namespace plab::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

// Shared experiment parameters; configs/asymptotic.ini and the golden table
// use the same values.
inline constexpr double kDt = 1e-3;
inline constexpr double kTol = 1e-8;
inline constexpr double kEps = 1e-6;
inline constexpr double kOrderSlack = 1e-13;
inline constexpr std::size_t kN = 63;

/// b rises from 1 to 2 and ω from 0 to 4 after t = 0, frozen at (1, 0) before.
inline CoefficientProfile rising_profile() {
  return CoefficientProfile(ExpApproach{2.0, -1.0, 1.0, 0.0}, ExpApproach{4.0, -4.0, 0.5, 0.0}, 1.0,
                            2.0, 0.0, 4.0);
}

/// b(t) = 1 + e^{-t} (clamped to [1, 2]), ω ≡ 1.
inline CoefficientProfile decaying_profile() {
  CoefficientProfile p(ExpApproach{1.0, 1.0, 1.0, 0.0}, Constant{1.0}, 1.0, 2.0, 1.0, 1.0);
  p.set_asymptotic_limits(1.0, 1.0);
  return p;
}

inline const std::vector<double>& asymptotic_checkpoints() {
  static const std::vector<double> cps{0.0, 5.0, 10.0, 20.0};
  return cps;
}

inline SamplingConfig asymptotic_sampling(std::uint64_t seed) {
  SamplingConfig cfg;
  cfg.n_seeds = 20;
  cfg.seed = seed;
  cfg.policies = {SelectionPolicy::upper(), SelectionPolicy::lower(), SelectionPolicy::zero(),
                  SelectionPolicy::random_switch(seed)};
  cfg.tol = kTol;
  return cfg;
}

namespace detail {

inline GridFunction random_data(std::mt19937_64& rng, const GridSpec& s, double scale,
                                double zero_fraction) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::bernoulli_distribution z(zero_fraction);
  std::vector<double> v(s.n_interior());
  for (double& x : v) x = z(rng) ? 0.0 : d(rng);
  return GridFunction(s, std::move(v));
}

inline GridFunction random_above(std::mt19937_64& rng, const GridFunction& u, double scale) {
  std::uniform_real_distribution<double> d(0.0, scale);
  std::bernoulli_distribution tie(0.3);
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) {
    if (!tie(rng)) x += d(rng);
  }
  return GridFunction(u.spec(), std::move(v));
}

/// Piecewise-linear profile with random knots inside b ∈ [1, 2], ω ∈ [0, 4].
inline CoefficientProfile random_profile(std::mt19937_64& rng, double t0, double t1) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Knot> bk, wk;
  for (int k = 0; k <= 8; ++k) {
    const double t = t0 + (t1 - t0) * k / 8.0;
    bk.push_back({t, 1.0 + u01(rng)});
    wk.push_back({t, 4.0 * u01(rng)});
  }
  return CoefficientProfile(Table{bk}, Table{wk}, 1.0, 2.0, 0.0, 4.0);
}

inline std::vector<SelectionPolicy> all_policies(std::uint64_t seed) {
  return {SelectionPolicy::upper(), SelectionPolicy::lower(), SelectionPolicy::zero(),
          SelectionPolicy::random_switch(seed)};
}

inline double max_excess(const GridFunction& below, const GridFunction& above) {
  double worst = 0.0;
  for (std::size_t i = 0; i < below.size(); ++i) worst = std::max(worst, below[i] - above[i]);
  return worst;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

inline CriterionResult equilibrium_exactness() {
  double worst = 0.0;
  for (std::size_t n : {1u, 7u, 31u, 63u, 127u}) {
    const GridSpec s(n);
    worst = std::max(worst, stationarity_residual(positive_equilibrium_closed_form({1.0, 0.0}, s),
                                                  {1.0, 0.0}));
  }
  return {1, "equilibrium exactness (omega = 0)", worst <= 1e-12, worst, 1e-12,
          "max residual over n in {1,7,31,63,127}"};
}

inline CriterionResult equilibrium_consistency() {
  const EquilibriumParams p{1.0, 4.0};
  std::vector<double> gaps;
  for (std::size_t n : {31u, 63u, 127u}) {
    const GridSpec s(n);
    gaps.push_back(sup_distance(discrete_equilibrium(p, s), positive_equilibrium_closed_form(p, s)));
  }
  const double r1 = gaps[0] / gaps[1];
  const double r2 = gaps[1] / gaps[2];
  const bool ok = r1 >= 3.0 && r1 <= 5.0 && r2 >= 3.0 && r2 <= 5.0;
  return {2, "equilibrium consistency (second order)", ok, std::min(r1, r2), 3.0,
          "ratios " + detail::fmt(r1) + ", " + detail::fmt(r2) + " must lie in [3, 5]"};
}

/// Lower-policy trajectory from x stays below any-policy trajectory from y ≥ x,
/// and any-policy trajectory from x stays below the upper-policy one from y.
inline CriterionResult strong_order_preservation(const Options& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x3u);
  const GridSpec s(31);
  const auto policies = detail::all_policies(opt.seed);
  double worst = 0.0;
  std::size_t violations = 0;
  std::vector<double> a, b, c, d, scratch;
  for (int pair = 0; pair < 100; ++pair) {
    const auto profile = detail::random_profile(rng, 0.0, 1.0);
    const Scheme scheme(profile, s, kDt);
    const auto x = detail::random_data(rng, s, 1.0, 0.25);
    const auto y = detail::random_above(rng, x, 1.0);
    const auto& p = policies[pair % policies.size()];
    a.assign(x.values().begin(), x.values().end());
    c = a;
    b.assign(y.values().begin(), y.values().end());
    d = b;
    double t = 0.0;
    for (int k = 0; k < 1000; ++k) {
      scheme.advance(a, t, SelectionPolicy::lower(), scratch);
      scheme.advance(b, t, p, scratch);
      scheme.advance(c, t, p, scratch);
      scheme.advance(d, t, SelectionPolicy::upper(), scratch);
      t += kDt;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::max(a[i] - b[i], c[i] - d[i]);
        worst = std::max(worst, e);
        if (e > kOrderSlack) ++violations;
      }
    }
  }
  return {3, "strong order preservation", violations == 0, worst, kOrderSlack,
          std::to_string(violations) + " violations over 100 pairs x 1000 steps"};
}

inline CriterionResult odd_symmetry(const Options& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x4u);
  const GridSpec s(kN);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto profile = detail::random_profile(rng, 0.0, 1.0);
    const Scheme scheme(profile, s, kDt);
    const auto x = detail::random_data(rng, s, 1.0, 0.25);
    for (const auto& p : detail::all_policies(opt.seed + k)) {
      const auto fwd = integrate_steps(x, 0.0, 1000, scheme, p);
      const auto mir = integrate_steps(-x, 0.0, 1000, scheme, p.flipped());
      for (std::size_t j = 0; j < fwd.size(); ++j) {
        worst = std::max(worst, sup_norm(fwd.states()[j] + mir.states()[j]));
      }
    }
  }
  return {4, "odd symmetry", worst <= kOrderSlack, worst, kOrderSlack,
          "10 data x 4 policies x 1000 steps"};
}

/// The rising-profile extremal pair shared by criteria 5 to 8.
struct RisingCase {
  CoefficientProfile profile = rising_profile();
  GridSpec spec{kN};
  std::optional<ExtremalPair> pair;
  std::string error;
  std::vector<AttractorSample> samples;
};

inline RisingCase make_rising_case() {
  RisingCase rc;
  try {
    rc.pair = extremal_trajectories({0.0, 5.0}, kDt, rc.profile, rc.spec, kTol,
                                    HorizonSchedule::doubling(5.0, 5), 10);
  } catch (const ConvergenceError& e) {
    rc.error = e.what();
  }
  return rc;
}

inline CriterionResult sandwich_bounds(const RisingCase& rc) {
  CriterionResult r{5, "sandwich bounds", false, 0.0, kEps, ""};
  if (!rc.pair) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = rc.error;
    return r;
  }
  // Both the discrete equilibria (exact fixed points of the stepper) and the
  // closed forms (off by O(h²)) must bracket gamma_hi.
  const auto low = discrete_equilibrium(lower_params(rc.profile), rc.spec);
  const auto high = discrete_equilibrium(upper_params(rc.profile), rc.spec);
  const auto low_cf = positive_equilibrium_closed_form(lower_params(rc.profile), rc.spec);
  const auto high_cf = positive_equilibrium_closed_form(upper_params(rc.profile), rc.spec);
  double discrete = 0.0, closed = 0.0;
  for (const auto& g : rc.pair->gamma_hi) {
    discrete = std::max({discrete, detail::max_excess(low, g), detail::max_excess(g, high)});
    closed = std::max({closed, detail::max_excess(low_cf, g), detail::max_excess(g, high_cf)});
  }
  r.measured = std::max(discrete, closed);
  r.passed = r.measured <= kEps;
  r.detail = "discrete bounds " + detail::fmt(discrete) + ", closed-form bounds " +
             detail::fmt(closed) + ", converged with gap " + detail::fmt(rc.pair->cauchy_gap) +
             " from s = " + detail::fmt(rc.pair->horizon_used);
  return r;
}

inline CriterionResult extremal_symmetry(const RisingCase& rc) {
  CriterionResult r{6, "extremal pair symmetry", false, 0.0, 1e-10, ""};
  if (!rc.pair) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = rc.error;
    return r;
  }
  for (std::size_t k = 0; k < rc.pair->gamma_hi.size(); ++k) {
    r.measured = std::max(r.measured, sup_norm(rc.pair->gamma_lo[k] + rc.pair->gamma_hi[k]));
  }
  r.passed = r.measured <= r.threshold;
  return r;
}

/// Also fills rc.samples for the attraction criterion.
inline CriterionResult attractor_in_interval(RisingCase& rc, const Options& opt) {
  CriterionResult r{7, "attractor inside extremal interval", false, 0.0, kEps, ""};
  if (!rc.pair) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = rc.error;
    return r;
  }
  SamplingConfig cfg;
  cfg.n_seeds = 20;
  cfg.seed = opt.seed;
  cfg.policies = detail::all_policies(opt.seed);
  cfg.jobs = opt.jobs;
  const auto top = discrete_equilibrium(upper_params(rc.profile), rc.spec);
  const OrderInterval box(-top, top);
  std::size_t members = 0;
  try {
    for (double t : {0.0, 2.5, 5.0}) {
      rc.samples.push_back(pullback_attractor_sample(t, rc.profile, rc.spec, kDt, cfg));
      const auto interval = rc.pair->interval_at(t);
      for (const auto& m : rc.samples.back().members) {
        r.measured = std::max({r.measured, interval_distance(m, interval), interval_distance(m, box)});
        ++members;
      }
    }
  } catch (const ConvergenceError& e) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = e.what();
    return r;
  }
  r.passed = r.measured <= kEps;
  r.detail = std::to_string(members) + " members at t in {0, 2.5, 5}";
  return r;
}

/// Probe endpoints from deeper starts approach the sampled attractor at t = 0.
inline CriterionResult pullback_attraction(const RisingCase& rc, const Options& opt) {
  CriterionResult r{8, "pullback attraction", false, 0.0, kTol, ""};
  if (rc.samples.empty()) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = "no attractor sample available";
    return r;
  }
  std::mt19937_64 rng(opt.seed ^ 0x8u);
  std::vector<GridFunction> probes;
  for (int k = 0; k < 8; ++k) probes.push_back(detail::random_data(rng, rc.spec, 3.0, 0.0));
  const auto policies = detail::all_policies(opt.seed + 1);
  const std::vector<double> depths{5.0, 10.0, 20.0, 40.0};
  const Scheme scheme(rc.profile, rc.spec, kDt);
  const auto curve = attraction_curve(0.0, probes, policies, depths, rc.samples.front().members,
                                      scheme, opt.jobs);
  double worst_rise = -std::numeric_limits<double>::infinity();
  std::string list;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (k > 0) worst_rise = std::max(worst_rise, curve[k].distance - curve[k - 1].distance);
    list += (k ? ", " : "") + detail::fmt(curve[k].distance);
  }
  r.measured = worst_rise;
  r.passed = worst_rise <= kTol;
  r.detail = "distances at depths {5,10,20,40}: " + list;
  return r;
}

inline CriterionResult autonomous_degeneracy() {
  CriterionResult r{9, "autonomous degeneracy", false, 0.0, kTol, ""};
  const EquilibriumParams p{1.5, 3.0};
  const GridSpec s(kN);
  const auto profile = CoefficientProfile::constant(p.b, p.omega);
  try {
    const auto pair = extremal_trajectories({0.0, 5.0}, kDt, profile, s, kTol,
                                            HorizonSchedule::doubling(5.0, 5), 100);
    const auto eq = discrete_equilibrium(p, s);
    double drift = 0.0, to_eq = 0.0;
    for (const auto& g : pair.gamma_hi) {
      drift = std::max(drift, sup_distance(g, pair.gamma_hi.front()));
      to_eq = std::max(to_eq, sup_distance(g, eq));
    }
    r.measured = drift;
    r.passed = drift <= kTol && to_eq <= kEps;
    r.detail = "distance to discrete equilibrium " + detail::fmt(to_eq) + " (limit 1e-06)";
  } catch (const ConvergenceError& e) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = e.what();
  }
  return r;
}

/// Computes the asymptotic table; the caller may compare it with a frozen copy.
inline CriterionResult upper_semicontinuity(const Options& opt,
                                            std::optional<AsymptoticTable>* table_out = nullptr) {
  CriterionResult r{10, "upper semicontinuity", false, 0.0, kTol, ""};
  auto cfg = asymptotic_sampling(opt.seed);
  cfg.jobs = opt.jobs;
  try {
    const auto table = asymptotic_experiment(decaying_profile(), {1.0, 1.0}, GridSpec(kN), kDt,
                                             asymptotic_checkpoints(), cfg);
    double worst_rise = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      worst_rise = std::max({worst_rise, table.rows[k].dist_attractor - table.rows[k - 1].dist_attractor,
                             table.rows[k].dist_gamma - table.rows[k - 1].dist_gamma});
    }
    const double final_gap = table.rows.back().dist_gamma;
    r.measured = worst_rise;
    r.passed = worst_rise <= kTol && final_gap < 1e-3;
    r.detail = "final gamma gap " + detail::fmt(final_gap) + " (limit 0.001)";
    if (table_out) *table_out = table;
  } catch (const ConvergenceError& e) {
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = e.what();
  }
  return r;
}

/// Translation identity, bit-identical concatenation and order/metric compatibility.
inline CriterionResult axiom_suite(const Options& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xbu);
  const GridSpec s(15);
  std::size_t failures = 0;
  for (int k = 0; k < 10; ++k) {
    const auto profile = detail::random_profile(rng, -1.0, 1.0);
    const auto x = detail::random_data(rng, s, 1.0, 0.25);
    for (const auto& p : detail::all_policies(opt.seed + k)) {
      const auto whole = integrate(x, -1.0, 1.0, 0.01, profile, p);
      const Scheme scheme(profile, s, whole.dt());
      const std::size_t cut = 37 + 5 * static_cast<std::size_t>(k);
      const auto tail = integrate_steps(whole.states()[cut], whole.times()[cut],
                                        whole.size() - 1 - cut, scheme, p);
      for (std::size_t j = 0; j < tail.size(); ++j) {
        if (!(tail.states()[j] == whole.states()[cut + j])) ++failures;
      }
      const auto phi = integrate_steps(x, -1.0, cut, scheme, p);
      const auto psi = integrate_steps(phi.final_state(), phi.final_time(), whole.size() - 1 - cut,
                                       scheme, p);
      if (!(concatenate(phi, psi) == whole)) ++failures;
    }
  }
  const GridSpec g(9);
  for (int k = 0; k < 1000; ++k) {
    const auto u = detail::random_data(rng, g, 1.0, 0.0);
    const auto v = detail::random_above(rng, u, 1.0);
    const auto w = detail::random_above(rng, v, 1.0);
    if (!(metric(u, v) <= metric(u, w) && metric(v, w) <= metric(u, w))) ++failures;
    const std::vector<GridFunction> set{u, v, w, detail::random_data(rng, g, 5.0, 0.0)};
    const auto box = bounding_interval(set);
    for (const auto& m : set) {
      if (!box.contains(m)) ++failures;
    }
    const double eps = std::ldexp(1.0, -(k % 40) - 1);
    const auto un = u - GridFunction::constant(g, eps);
    const auto vn = v + GridFunction::constant(g, eps);
    if (!leq(un, vn) || !(metric(un, u) > 0.0)) ++failures;
  }
  return {11, "axiom suite", failures == 0, static_cast<double>(failures), 0.0,
          "translation, concatenation, compatibility on 1000 ordered triples"};
}

struct Report {
  std::vector<CriterionResult> results;
  std::optional<AsymptoticTable> asymptotic;

  bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  }
};

inline Report run_all(const Options& opt = {}) {
  Report rep;
  rep.results.push_back(equilibrium_exactness());
  rep.results.push_back(equilibrium_consistency());
  rep.results.push_back(strong_order_preservation(opt));
  rep.results.push_back(odd_symmetry(opt));
  auto rc = make_rising_case();
  rep.results.push_back(sandwich_bounds(rc));
  rep.results.push_back(extremal_symmetry(rc));
  rep.results.push_back(attractor_in_interval(rc, opt));
  rep.results.push_back(pullback_attraction(rc, opt));
  rep.results.push_back(autonomous_degeneracy());
  rep.results.push_back(upper_semicontinuity(opt, &rep.asymptotic));
  rep.results.push_back(axiom_suite(opt));
  return rep;
}

inline std::string format_line(const CriterionResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "measured=%.6g threshold=%.6g", r.measured, r.threshold);
  std::string line = std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " +
                     r.name + ": " + buf;
  if (!r.detail.empty()) line += " (" + r.detail + ")";
  return line;
}

}  // namespace plab::verify
