#pragma once

// Time-dependent coefficients b(t), ω(t) of the reaction term
// b(t)·H₀(u) + ω(t)·u, with their declared admissibility bounds.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "plab/error.hpp"
#include "plab/grid.hpp"

namespace plab {

struct Constant {
  double value = 0.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// limit + amplitude·exp(-rate·(t - t_ref)), saturated at the declared bounds.
struct ExpApproach {
  double limit = 0.0;
  double amplitude = 0.0;
  double rate = 1.0;
  double t_ref = 0.0;
  friend bool operator==(const ExpApproach&, const ExpApproach&) = default;
};

struct Knot {
  double t = 0.0;
  double value = 0.0;
  friend bool operator==(const Knot&, const Knot&) = default;
};

/// Piecewise-linear through sorted knots, constant beyond the ends.
struct Table {
  std::vector<Knot> knots;
  friend bool operator==(const Table&, const Table&) = default;
};

using ScalarLaw = std::variant<Constant, ExpApproach, Table>;

namespace detail {

inline double eval_law(const ScalarLaw& law, double t, double lo, double hi) {
  struct Visitor {
    double t, lo, hi;
    double operator()(const Constant& c) const { return c.value; }
    double operator()(const ExpApproach& e) const {
      const double raw = e.limit + e.amplitude * std::exp(-e.rate * (t - e.t_ref));
      // exp overflows to +inf for very negative t; clamp keeps it finite.
      return std::clamp(raw, lo, hi);
    }
    double operator()(const Table& tab) const {
      const auto& k = tab.knots;
      if (t <= k.front().t) return k.front().value;
      if (t >= k.back().t) return k.back().value;
      auto it = std::upper_bound(k.begin(), k.end(), t,
                                 [](double x, const Knot& kn) { return x < kn.t; });
      const Knot& r = *it;
      const Knot& l = *(it - 1);
      const double w = (t - l.t) / (r.t - l.t);
      return l.value + w * (r.value - l.value);
    }
  };
  return std::visit(Visitor{t, lo, hi}, law);
}

inline std::optional<double> law_limit(const ScalarLaw& law) {
  if (auto c = std::get_if<Constant>(&law)) return c->value;
  if (auto e = std::get_if<ExpApproach>(&law)) return e->limit;
  if (auto t = std::get_if<Table>(&law)) return t->knots.back().value;
  return std::nullopt;
}

inline void check_law(const ScalarLaw& law, double lo, double hi, const std::string& name) {
  auto inside = [&](double v) { return v >= lo && v <= hi; };
  auto fail = [&](const std::string& why) {
    throw ValidationError("profile." + name + ": " + why);
  };
  if (auto c = std::get_if<Constant>(&law)) {
    if (!inside(c->value)) fail("constant value outside declared bounds");
  } else if (auto e = std::get_if<ExpApproach>(&law)) {
    if (!(e->rate > 0.0)) fail("exp_approach rate must be positive");
    if (!inside(e->limit)) fail("exp_approach limit outside declared bounds");
    if (!std::isfinite(e->amplitude) || !std::isfinite(e->t_ref)) fail("non-finite parameter");
  } else if (auto t = std::get_if<Table>(&law)) {
    if (t->knots.empty()) fail("table has no knots");
    for (std::size_t i = 0; i < t->knots.size(); ++i) {
      if (!inside(t->knots[i].value)) fail("table knot value outside declared bounds");
      if (i > 0 && !(t->knots[i].t > t->knots[i - 1].t)) fail("table knots not strictly increasing");
    }
  }
}

}  // namespace detail

struct CoefficientValues {
  double b = 0.0;
  double omega = 0.0;
};

class CoefficientProfile {
 public:
  CoefficientProfile(ScalarLaw b, ScalarLaw omega, double b0, double b1, double omega0,
                     double omega1)
      : b_(std::move(b)), omega_(std::move(omega)), b0_(b0), b1_(b1), omega0_(omega0),
        omega1_(omega1) {
    if (!(0.0 < b0_ && b0_ <= b1_)) throw ValidationError("profile: need 0 < b0 <= b1");
    if (!(0.0 <= omega0_ && omega0_ <= omega1_)) {
      throw ValidationError("profile: need 0 <= omega0 <= omega1");
    }
    detail::check_law(b_, b0_, b1_, "b");
    detail::check_law(omega_, omega0_, omega1_, "omega");
  }

  /// Time-independent profile b ≡ b, ω ≡ omega, bounds collapsed onto the values.
  static CoefficientProfile constant(double b, double omega) {
    CoefficientProfile p(Constant{b}, Constant{omega}, b, b, omega, omega);
    p.set_asymptotic_limits(b, omega);
    return p;
  }

  CoefficientValues eval(double t) const {
    return {detail::eval_law(b_, t, b0_, b1_), detail::eval_law(omega_, t, omega0_, omega1_)};
  }

  double b0() const noexcept { return b0_; }
  double b1() const noexcept { return b1_; }
  double omega0() const noexcept { return omega0_; }
  double omega1() const noexcept { return omega1_; }
  const ScalarLaw& b_law() const noexcept { return b_; }
  const ScalarLaw& omega_law() const noexcept { return omega_; }

  /// Declares the profile asymptotically autonomous. The limits must agree with
  /// the laws' own t → +∞ behaviour.
  void set_asymptotic_limits(double b_inf, double omega_inf) {
    auto lb = detail::law_limit(b_);
    auto lo = detail::law_limit(omega_);
    if (std::abs(*lb - b_inf) > 1e-14 * std::max(1.0, std::abs(b_inf)) ||
        std::abs(*lo - omega_inf) > 1e-14 * std::max(1.0, std::abs(omega_inf))) {
      throw ValidationError("profile: declared asymptotic limits disagree with the laws");
    }
    b_inf_ = b_inf;
    omega_inf_ = omega_inf;
  }
  std::optional<double> b_inf() const noexcept { return b_inf_; }
  std::optional<double> omega_inf() const noexcept { return omega_inf_; }
  bool is_asymptotically_autonomous() const noexcept { return b_inf_.has_value(); }

  friend bool operator==(const CoefficientProfile&, const CoefficientProfile&) = default;

 private:
  ScalarLaw b_;
  ScalarLaw omega_;
  double b0_, b1_, omega0_, omega1_;
  std::optional<double> b_inf_;
  std::optional<double> omega_inf_;
};

/// First Dirichlet eigenvalue of the 3-point Laplacian, (4/h²)·sin²(πh/2).
inline double discrete_first_eigenvalue(const GridSpec& spec) {
  const double h = spec.h();
  const double s = std::sin(std::numbers::pi * h / 2.0);
  return 4.0 / (h * h) * s * s;
}

struct ValidationReport {
  double lambda1_continuous = std::numbers::pi * std::numbers::pi;
  double lambda1_discrete = 0.0;
  /// π² - ω₁
  double continuous_margin = 0.0;
  /// λ₁ʰ - ω₁
  double discrete_margin = 0.0;
  /// 1 - dt·ω₁
  double step_margin = 0.0;
};

/// Admissibility of (profile, grid, dt) for the order-preserving scheme.
/// Throws ValidationError naming the first violated condition.
inline ValidationReport validate(const CoefficientProfile& profile, const GridSpec& spec,
                                 double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  ValidationReport r;
  r.lambda1_discrete = discrete_first_eigenvalue(spec);
  r.continuous_margin = r.lambda1_continuous - profile.omega1();
  r.discrete_margin = r.lambda1_discrete - profile.omega1();
  r.step_margin = 1.0 - dt * profile.omega1();
  if (!(r.continuous_margin > 0.0)) {
    throw ValidationError("(a) omega1 = " + std::to_string(profile.omega1()) +
                          " is not below pi^2");
  }
  if (!(r.discrete_margin > 0.0)) {
    throw ValidationError("(b) omega1 = " + std::to_string(profile.omega1()) +
                          " is not below the discrete first eigenvalue " +
                          std::to_string(r.lambda1_discrete) + "; use a finer grid");
  }
  if (!(r.step_margin > 0.0)) {
    throw ValidationError("(c) dt*omega1 = " + std::to_string(dt * profile.omega1()) +
                          " is not below 1; reduce dt");
  }
  return r;
}

}  // namespace plab
