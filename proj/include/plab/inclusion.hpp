#pragma once

// Time stepping of the discrete inclusion
//
//   du/dt = L_h u + b(t)·f + ω(t)·u,   f_i ∈ H₀(u_i),
//
// where H₀ is the Heaviside graph (sign, with the segment [-1,1] at 0) and f is
// picked by a deterministic SelectionPolicy. Diffusion and the ω-term are
// implicit, the selection explicit, so every step is one tridiagonal solve
// with an M-matrix and the scheme is order preserving.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/error.hpp"
#include "plab/grid.hpp"
#include "plab/tridiagonal.hpp"

namespace plab {

enum class SelectionKind { upper, lower, zero, random_switch };

/// Tie-breaking rule at u = 0. Off zero every policy returns sign(u).
struct SelectionPolicy {
  SelectionKind kind = SelectionKind::upper;
  std::uint64_t seed = 0;
  /// random_switch only: use the negated draw. This is the mirror image of the
  /// same policy under u ↦ -u.
  bool negate_draws = false;

  static SelectionPolicy upper() { return {SelectionKind::upper}; }
  static SelectionPolicy lower() { return {SelectionKind::lower}; }
  static SelectionPolicy zero() { return {SelectionKind::zero}; }
  static SelectionPolicy random_switch(std::uint64_t seed) {
    return {SelectionKind::random_switch, seed, false};
  }

  /// Policy p' with p'(-u) = -p(u).
  SelectionPolicy flipped() const {
    switch (kind) {
      case SelectionKind::upper: return lower();
      case SelectionKind::lower: return upper();
      case SelectionKind::zero: return zero();
      case SelectionKind::random_switch: return {kind, seed, !negate_draws};
    }
    return *this;
  }

  std::string name() const {
    switch (kind) {
      case SelectionKind::upper: return "upper";
      case SelectionKind::lower: return "lower";
      case SelectionKind::zero: return "zero";
      case SelectionKind::random_switch:
        return std::string(negate_draws ? "-" : "") + "random_switch(" + std::to_string(seed) + ")";
    }
    return "?";
  }

  friend bool operator==(const SelectionPolicy&, const SelectionPolicy&) = default;
};

inline SelectionPolicy parse_policy(const std::string& text, std::uint64_t default_seed) {
  if (text == "upper") return SelectionPolicy::upper();
  if (text == "lower") return SelectionPolicy::lower();
  if (text == "zero") return SelectionPolicy::zero();
  if (text == "random_switch") return SelectionPolicy::random_switch(default_seed);
  const std::string prefix = "random_switch(";
  if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
    const std::string digits = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(digits, &used);
      if (used == digits.size()) return SelectionPolicy::random_switch(seed);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("unknown selection policy '" + text + "'");
}

namespace detail {

/// splitmix64 finalizer; a counter-based stream keyed by (seed, step, node).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double draw_at_zero(const SelectionPolicy& p, std::int64_t step_key, std::size_t node) {
  std::uint64_t h = mix64(p.seed);
  h = mix64(h ^ static_cast<std::uint64_t>(step_key));
  h = mix64(h ^ static_cast<std::uint64_t>(node));
  const double v = static_cast<double>(h % 3) - 1.0;
  return p.negate_draws ? -v : v;
}

inline double select_value(double u, const SelectionPolicy& p, std::int64_t step_key,
                           std::size_t node) {
  if (u > 0.0) return 1.0;
  if (u < 0.0) return -1.0;
  switch (p.kind) {
    case SelectionKind::upper: return 1.0;
    case SelectionKind::lower: return -1.0;
    case SelectionKind::zero: return 0.0;
    case SelectionKind::random_switch: return draw_at_zero(p, step_key, node);
  }
  return 0.0;
}

}  // namespace detail

/// f with f_i ∈ H₀(u_i). `step_key` indexes the random_switch stream and is
/// ignored by the deterministic policies.
inline GridFunction heaviside_select(const GridFunction& u, const SelectionPolicy& policy,
                                     std::int64_t step_key = 0) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = detail::select_value(u[i], policy, step_key, i);
  return GridFunction(u.spec(), std::move(f));
}

/// Validated (profile, grid, dt) triple. Construction runs validate(); a
/// Scheme therefore always satisfies the M-matrix condition 1 - dt·ω₁ > 0.
class Scheme {
 public:
  Scheme(CoefficientProfile profile, GridSpec spec, double dt)
      : profile_(std::move(profile)), spec_(spec), dt_(dt),
        report_(validate(profile_, spec_, dt_)) {}

  const CoefficientProfile& profile() const noexcept { return profile_; }
  const GridSpec& spec() const noexcept { return spec_; }
  double dt() const noexcept { return dt_; }
  const ValidationReport& report() const noexcept { return report_; }

  /// Key of the random_switch stream for the step starting at t.
  std::int64_t step_key(double t) const { return std::llround(t / dt_); }

  /// One step from time t to t + dt, in place on the interior values.
  void advance(std::span<double> u, double t, const SelectionPolicy& policy,
               std::vector<double>& scratch) const {
    const double t_next = t + dt_;
    const auto c = profile_.eval(t_next);
    const double h = spec_.h();
    const double r = dt_ / (h * h);
    const std::int64_t key = step_key(t);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += dt_ * c.b * detail::select_value(u[i], policy, key, i);
    }
    solve_toeplitz_tridiagonal(1.0 + 2.0 * r - dt_ * c.omega, -r, u, scratch);
  }

  /// (I - dt·L_h - dt·ω(t+dt)·I) u' = u + dt·b(t+dt)·f(u).
  GridFunction step(const GridFunction& u, double t, const SelectionPolicy& policy) const {
    if (!(u.spec() == spec_)) throw UsageError("step: grid spec mismatch");
    std::vector<double> v(u.values().begin(), u.values().end());
    std::vector<double> scratch;
    advance(v, t, policy, scratch);
    return GridFunction(spec_, std::move(v));
  }

  /// Runs n_steps from (x, t) without storing intermediate states. Returns the
  /// final state and the final time reached by repeated addition of dt.
  std::pair<GridFunction, double> run(const GridFunction& x, double t, std::size_t n_steps,
                                      const SelectionPolicy& policy) const {
    if (!(x.spec() == spec_)) throw UsageError("run: grid spec mismatch");
    std::vector<double> v(x.values().begin(), x.values().end());
    std::vector<double> scratch;
    for (std::size_t k = 0; k < n_steps; ++k) {
      advance(v, t, policy, scratch);
      t += dt_;
    }
    return {GridFunction(spec_, std::move(v)), t};
  }

 private:
  CoefficientProfile profile_;
  GridSpec spec_;
  double dt_;
  ValidationReport report_;
};

/// Free-function form; validates on every call.
inline GridFunction step(const GridFunction& u, double t, double dt,
                         const CoefficientProfile& profile, const SelectionPolicy& policy) {
  return Scheme(profile, u.spec(), dt).step(u, t, policy);
}

/// One element of the solution family started at (t_start, states[0]).
/// times[k] is obtained from t_start by k repeated additions of dt, which makes
/// restarts from any stored state reproduce the tail exactly.
class Trajectory {
 public:
  struct Segment {
    std::size_t first_step = 0;
    SelectionPolicy policy;
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  const GridSpec& spec() const noexcept { return states_.front().spec(); }
  double t_start() const noexcept { return times_.front(); }
  double final_time() const noexcept { return times_.back(); }
  double dt() const noexcept { return dt_; }
  double requested_dt() const noexcept { return requested_dt_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::span<const GridFunction> states() const noexcept { return states_; }
  std::span<const double> times() const noexcept { return times_; }
  const GridFunction& initial_state() const noexcept { return states_.front(); }
  const GridFunction& final_state() const noexcept { return states_.back(); }
  const CoefficientProfile& profile() const noexcept { return profile_; }
  /// Policy of the first segment; concatenations may carry several.
  const SelectionPolicy& policy() const noexcept { return segments_.front().policy; }
  std::span<const Segment> segments() const noexcept { return segments_; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  Trajectory(CoefficientProfile profile, double dt, double requested_dt)
      : profile_(std::move(profile)), dt_(dt), requested_dt_(requested_dt) {}

  CoefficientProfile profile_;
  double dt_;
  double requested_dt_;
  std::vector<double> times_;
  std::vector<GridFunction> states_;
  std::vector<Segment> segments_;

  friend Trajectory integrate_steps(const GridFunction&, double, std::size_t, const Scheme&,
                                    const SelectionPolicy&);
  friend Trajectory concatenate(const Trajectory&, const Trajectory&);
  friend Trajectory integrate(const GridFunction&, double, double, double,
                              const CoefficientProfile&, const SelectionPolicy&);
};

/// Trajectory of exactly n_steps steps of the scheme's dt.
inline Trajectory integrate_steps(const GridFunction& x, double s, std::size_t n_steps,
                                  const Scheme& scheme, const SelectionPolicy& policy) {
  if (!(x.spec() == scheme.spec())) throw UsageError("integrate: grid spec mismatch");
  Trajectory tr(scheme.profile(), scheme.dt(), scheme.dt());
  tr.times_.reserve(n_steps + 1);
  tr.states_.reserve(n_steps + 1);
  tr.segments_.push_back({0, policy});
  std::vector<double> v(x.values().begin(), x.values().end());
  std::vector<double> scratch;
  double t = s;
  tr.times_.push_back(t);
  tr.states_.push_back(x);
  for (std::size_t k = 0; k < n_steps; ++k) {
    scheme.advance(v, t, policy, scratch);
    t += scheme.dt();
    tr.times_.push_back(t);
    tr.states_.emplace_back(x.spec(), v);
  }
  return tr;
}

/// Number of steps that covers `span` with a step no larger than dt.
inline std::size_t step_count(double span, double dt) {
  if (span < 0.0) throw UsageError("step_count: negative time span");
  if (span == 0.0) return 0;
  const double q = span / dt;
  // Snap ratios that are integers up to rounding so (1.0, 0.1) gives 10 steps.
  const double nearest = std::round(q);
  if (nearest >= 1.0 && std::abs(q - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(q));
}

/// Trajectory on [s, t_end]. dt is shrunk so the interval splits into whole
/// steps; the adjusted value is reported by Trajectory::dt().
inline Trajectory integrate(const GridFunction& x, double s, double t_end, double dt,
                            const CoefficientProfile& profile, const SelectionPolicy& policy) {
  if (!(s <= t_end)) throw UsageError("integrate: need s <= t_end");
  if (!(dt > 0.0)) throw UsageError("integrate: dt must be positive");
  const std::size_t n = step_count(t_end - s, dt);
  const double dt_adj = n == 0 ? dt : (t_end - s) / static_cast<double>(n);
  Trajectory tr = integrate_steps(x, s, n, Scheme(profile, x.spec(), dt_adj), policy);
  tr.requested_dt_ = dt;
  return tr;
}

/// Joins phi and psi at phi's final time. The junction (time, state, dt, grid,
/// profile) must match exactly.
inline Trajectory concatenate(const Trajectory& phi, const Trajectory& psi) {
  if (!(phi.spec() == psi.spec())) throw UsageError("concatenate: grid spec mismatch");
  if (phi.dt() != psi.dt()) throw UsageError("concatenate: time steps differ");
  if (!(phi.profile() == psi.profile())) throw UsageError("concatenate: profiles differ");
  if (phi.final_time() != psi.t_start()) throw UsageError("concatenate: junction times differ");
  if (!(phi.final_state() == psi.initial_state())) {
    throw UsageError("concatenate: junction states differ");
  }
  Trajectory out = phi;
  const std::size_t offset = phi.size() - 1;
  out.times_.insert(out.times_.end(), psi.times_.begin() + 1, psi.times_.end());
  out.states_.insert(out.states_.end(), psi.states_.begin() + 1, psi.states_.end());
  for (const auto& seg : psi.segments_) {
    Trajectory::Segment shifted{seg.first_step + offset, seg.policy};
    // A psi segment that starts where phi's last segment already applies merges.
    if (shifted.policy == out.segments_.back().policy) continue;
    out.segments_.push_back(shifted);
  }
  return out;
}

/// Max over consecutive pairs of the sup-norm residual of the one-step identity.
inline double scheme_residual(const Trajectory& tr) {
  const Scheme scheme(tr.profile(), tr.spec(), tr.dt());
  const double h = tr.spec().h();
  const double r = tr.dt() / (h * h);
  double worst = 0.0;
  std::size_t seg = 0;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    while (seg + 1 < tr.segments().size() && tr.segments()[seg + 1].first_step <= k) ++seg;
    const auto& policy = tr.segments()[seg].policy;
    const auto& u = tr.states()[k];
    const auto& w = tr.states()[k + 1];
    const auto c = tr.profile().eval(tr.times()[k] + tr.dt());
    const auto key = scheme.step_key(tr.times()[k]);
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? w[i - 1] : 0.0;
      const double right = i + 1 < n ? w[i + 1] : 0.0;
      const double lhs = (1.0 + 2.0 * r - tr.dt() * c.omega) * w[i] - r * (left + right);
      const double rhs = u[i] + tr.dt() * c.b * detail::select_value(u[i], policy, key, i);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

/// Finite under-approximation of U(t, s, x): one endpoint per policy,
/// with exact duplicates removed.
struct AttainabilitySample {
  double t = 0.0;
  double s = 0.0;
  GridFunction x;
  std::vector<GridFunction> endpoints;
  std::vector<SelectionPolicy> policies_used;
};

inline AttainabilitySample attainability_set(const GridFunction& x, double s, double t, double dt,
                                             const CoefficientProfile& profile,
                                             std::span<const SelectionPolicy> policies) {
  if (policies.empty()) throw UsageError("attainability_set: no policies");
  if (!(s <= t)) throw UsageError("attainability_set: need s <= t");
  AttainabilitySample out{t, s, x, {}, {policies.begin(), policies.end()}};
  for (const auto& p : policies) {
    GridFunction end = integrate(x, s, t, dt, profile, p).final_state();
    bool seen = false;
    for (const auto& e : out.endpoints) seen = seen || e == end;
    if (!seen) out.endpoints.push_back(std::move(end));
  }
  return out;
}

}  // namespace plab
