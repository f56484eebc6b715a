#pragma once

// Positive equilibrium v₁⁺ of the autonomous problem
//   -u'' = b·H₀(u) + ω·u on (0,1),  u(0) = u(1) = 0,  u > 0,
// i.e. the solution of -u'' = b + ω·u, and its mirror image v₁⁻ = -v₁⁺.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/error.hpp"
#include "plab/grid.hpp"
#include "plab/tridiagonal.hpp"

namespace plab {

struct EquilibriumParams {
  double b = 1.0;
  double omega = 0.0;

  void check() const {
    if (!(b > 0.0)) throw UsageError("EquilibriumParams: b must be positive");
    if (!(omega >= 0.0)) throw UsageError("EquilibriumParams: omega must be nonnegative");
    if (!(omega < std::numbers::pi * std::numbers::pi)) {
      throw UsageError("EquilibriumParams: omega must be below pi^2");
    }
  }

  friend bool operator==(const EquilibriumParams&, const EquilibriumParams&) = default;
};

/// Upper comparison parameters (b₁, ω₁) of a profile.
inline EquilibriumParams upper_params(const CoefficientProfile& p) { return {p.b1(), p.omega1()}; }
/// Lower comparison parameters (b₀, ω₀) of a profile.
inline EquilibriumParams lower_params(const CoefficientProfile& p) { return {p.b0(), p.omega0()}; }

/// Closed form of v₁⁺ at a point x ∈ [0,1].
///
/// For ω > 0, with a = √ω,
///   u(x) = (b/ω)·(cos(a(x - 1/2)) / cos(a/2) - 1)
///        = 2b·sin(a·x/2)·sin(a(1-x)/2) / (ω·cos(a/2)),
/// and the product form is used because it has no cancellation as ω → 0.
/// For ω = 0, u(x) = b·x(1-x)/2.
inline double positive_equilibrium_at(const EquilibriumParams& params, double x) {
  const double b = params.b;
  const double w = params.omega;
  if (w == 0.0) return 0.5 * b * x * (1.0 - x);
  const double a = std::sqrt(w);
  return 2.0 * b * std::sin(0.5 * a * x) * std::sin(0.5 * a * (1.0 - x)) / (w * std::cos(0.5 * a));
}

inline GridFunction positive_equilibrium_closed_form(const EquilibriumParams& params,
                                                     const GridSpec& spec) {
  params.check();
  return GridFunction::sample(spec, [&](double x) { return positive_equilibrium_at(params, x); });
}

inline GridFunction negative_equilibrium_closed_form(const EquilibriumParams& params,
                                                     const GridSpec& spec) {
  return -positive_equilibrium_closed_form(params, spec);
}

/// Solution of (-L_h - ω·I) u = b·𝟙. This is the exact fixed point of the
/// stepper under the upper policy with constant coefficients (b, ω).
inline GridFunction discrete_equilibrium(const EquilibriumParams& params, const GridSpec& spec) {
  params.check();
  const double lambda = discrete_first_eigenvalue(spec);
  if (!(params.omega < lambda)) {
    throw UsageError("discrete_equilibrium: omega = " + std::to_string(params.omega) +
                     " is not below the discrete first eigenvalue " + std::to_string(lambda));
  }
  const double h = spec.h();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> u(spec.n_interior(), params.b);
  std::vector<double> scratch;
  solve_toeplitz_tridiagonal(2.0 * inv_h2 - params.omega, -inv_h2, u, scratch);
  return GridFunction(spec, std::move(u));
}

/// Sup norm of -L_h u - ω·u - b·𝟙. Requires u > 0 so the selection is forced to 1.
inline double stationarity_residual(const GridFunction& u, const EquilibriumParams& params) {
  if (!is_nondegenerate(u)) {
    throw UsageError("stationarity_residual: u must be strictly positive");
  }
  const double h = u.spec().h();
  const double inv_h2 = 1.0 / (h * h);
  const std::size_t n = u.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    const double lap = (left - 2.0 * u[i] + right) * inv_h2;
    worst = std::max(worst, std::abs(-lap - params.omega * u[i] - params.b));
  }
  return worst;
}

}  // namespace plab
