#pragma once

// Pullback constructions for the discrete inclusion: extremal complete
// trajectories obtained as pullback limits from the sub/super-trajectories
// v₁⁻, v₁⁺, finite samples of the pullback attractor, and the structure and
// asymptotic experiments built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plab/coefficients.hpp"
#include "plab/equilibria.hpp"
#include "plab/error.hpp"
#include "plab/grid.hpp"
#include "plab/inclusion.hpp"
#include "plab/parallel.hpp"

namespace plab {

struct Window {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Increasing pullback depths s = t - depth.
struct HorizonSchedule {
  std::vector<double> depths;

  static HorizonSchedule doubling(double first, std::size_t count) {
    HorizonSchedule s;
    for (std::size_t k = 0; k < count; ++k) s.depths.push_back(first * std::ldexp(1.0, static_cast<int>(k)));
    return s;
  }

  void check() const {
    if (depths.empty()) throw UsageError("horizon schedule is empty");
    for (std::size_t k = 0; k < depths.size(); ++k) {
      if (!(depths[k] >= 0.0)) throw UsageError("horizon depths must be nonnegative");
      if (k > 0 && !(depths[k] > depths[k - 1])) {
        throw UsageError("horizon depths must be strictly increasing");
      }
    }
  }
};

/// Minimal and maximal bounded complete trajectories sampled on a window.
struct ExtremalPair {
  Window window;
  double dt = 0.0;
  std::size_t stride = 1;
  std::vector<double> times;
  std::vector<GridFunction> gamma_lo;
  std::vector<GridFunction> gamma_hi;
  /// Pullback start time of the accepted refinement, window.t_min - depth.
  double horizon_used = 0.0;
  double cauchy_gap = 0.0;
  /// Sup gap between consecutive refinements, one entry per refinement after the first.
  std::vector<double> gap_history;

  std::size_t index_of(double t) const {
    if (times.empty()) throw UsageError("ExtremalPair: empty");
    const double step = dt * static_cast<double>(stride);
    if (t < window.t_min - 0.5 * step || t > window.t_max + 0.5 * step) {
      throw UsageError("ExtremalPair: time " + std::to_string(t) + " outside the window");
    }
    if (step == 0.0) return 0;
    const auto k = static_cast<std::size_t>(std::llround((t - window.t_min) / step));
    return std::min(k, times.size() - 1);
  }
  const GridFunction& hi_at(double t) const { return gamma_hi[index_of(t)]; }
  const GridFunction& lo_at(double t) const { return gamma_lo[index_of(t)]; }
  OrderInterval interval_at(double t) const {
    const auto k = index_of(t);
    return OrderInterval(gamma_lo[k], gamma_hi[k]);
  }
};

namespace detail {

/// Runs `depth` (rounded to whole steps) before t_min, then stores every
/// `stride`-th state of the window.
inline std::vector<GridFunction> pullback_window(const Scheme& scheme, const GridFunction& start,
                                                 double t_min, std::size_t n_pre,
                                                 std::size_t n_window, std::size_t stride,
                                                 const SelectionPolicy& policy) {
  const double dt = scheme.dt();
  const double s = t_min - static_cast<double>(n_pre) * dt;
  const GridFunction u = scheme.run(start, s, n_pre, policy).first;
  std::vector<GridFunction> out;
  out.reserve(n_window / stride + 1);
  out.push_back(u);
  std::vector<double> v(u.values().begin(), u.values().end());
  std::vector<double> scratch;
  // Window times are re-anchored at t_min so every refinement sees the same
  // coefficient values inside the window.
  for (std::size_t k = 0; k < n_window; ++k) {
    scheme.advance(v, t_min + static_cast<double>(k) * dt, policy, scratch);
    if ((k + 1) % stride == 0) out.emplace_back(start.spec(), v);
  }
  return out;
}

inline double window_gap(std::span<const GridFunction> a, std::span<const GridFunction> b) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, sup_distance(a[k], b[k]));
  return gap;
}

}  // namespace detail

/// Pullback limits of the upper-policy trajectory from v₁⁺(b₁, ω₁) and of the
/// lower-policy trajectory from v₁⁻(b₁, ω₁), refined along the schedule until
/// consecutive refinements of gamma_hi agree to `tol` in sup norm over the
/// window. The discrete equilibrium is used as the super-trajectory because it
/// is exactly one for the stepper.
inline ExtremalPair extremal_trajectories(Window window, double dt,
                                          const CoefficientProfile& profile,
                                          const GridSpec& spec, double tol,
                                          const HorizonSchedule& schedule,
                                          std::size_t stride = 1) {
  schedule.check();
  if (!(tol > 0.0)) throw UsageError("extremal_trajectories: tol must be positive");
  if (!(window.t_min <= window.t_max)) throw UsageError("extremal_trajectories: empty window");
  if (stride == 0) throw UsageError("extremal_trajectories: stride must be positive");
  const std::size_t n_window = step_count(window.t_max - window.t_min, dt);
  const double dt_adj =
      n_window == 0 ? dt : (window.t_max - window.t_min) / static_cast<double>(n_window);
  if (n_window % stride != 0) {
    throw UsageError("extremal_trajectories: stride must divide the " + std::to_string(n_window) +
                     " window steps");
  }
  const Scheme scheme(profile, spec, dt_adj);
  const GridFunction top = discrete_equilibrium(upper_params(profile), spec);

  ExtremalPair pair;
  pair.window = window;
  pair.dt = dt_adj;
  pair.stride = stride;
  std::vector<GridFunction> previous;
  bool converged = false;
  std::size_t n_pre_used = 0;
  for (double depth : schedule.depths) {
    const std::size_t n_pre = step_count(depth, dt_adj);
    auto current = detail::pullback_window(scheme, top, window.t_min, n_pre, n_window, stride,
                                           SelectionPolicy::upper());
    if (!previous.empty()) {
      const double gap = detail::window_gap(previous, current);
      pair.gap_history.push_back(gap);
      if (gap < tol) {
        pair.gamma_hi = std::move(current);
        pair.cauchy_gap = gap;
        n_pre_used = n_pre;
        converged = true;
        break;
      }
    }
    previous = std::move(current);
  }
  if (!converged) {
    throw ConvergenceError("extremal_trajectories: horizon exhausted, last gap " +
                               std::to_string(pair.gap_history.empty() ? -1.0
                                                                       : pair.gap_history.back()),
                           pair.gap_history);
  }
  pair.gamma_lo = detail::pullback_window(scheme, -top, window.t_min, n_pre_used, n_window, stride,
                                          SelectionPolicy::lower());
  pair.horizon_used = window.t_min - static_cast<double>(n_pre_used) * dt_adj;
  for (std::size_t k = 0; k < pair.gamma_hi.size(); ++k) {
    pair.times.push_back(window.t_min + static_cast<double>(k * stride) * dt_adj);
  }
  return pair;
}

/// Finite sample of 𝒜(t).
struct AttractorSample {
  double t = 0.0;
  std::vector<GridFunction> members;
  double horizon_used = 0.0;
  std::size_t seed_count = 0;
  /// Symmetric Hausdorff gap between consecutive depths.
  std::vector<double> gap_history;
};

struct SamplingConfig {
  std::size_t n_seeds = 20;
  std::uint64_t seed = 0;
  std::vector<SelectionPolicy> policies{SelectionPolicy::upper(), SelectionPolicy::lower(),
                                        SelectionPolicy::zero(),
                                        SelectionPolicy::random_switch(0)};
  HorizonSchedule schedule = HorizonSchedule::doubling(5.0, 5);
  double tol = 1e-8;
  std::size_t jobs = 1;
};

/// Initial data drawn uniformly and independently per node from the order
/// interval [v₁⁻(b₁,ω₁) - 1, v₁⁺(b₁,ω₁) + 1].
inline std::vector<GridFunction> draw_seeds(const CoefficientProfile& profile, const GridSpec& spec,
                                            std::size_t n_seeds, std::uint64_t seed) {
  const GridFunction top = discrete_equilibrium(upper_params(profile), spec);
  std::mt19937_64 rng(seed);
  std::vector<GridFunction> out;
  out.reserve(n_seeds);
  for (std::size_t k = 0; k < n_seeds; ++k) {
    std::vector<double> v(spec.n_interior());
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::uniform_real_distribution<double> dist(-top[i] - 1.0, top[i] + 1.0);
      v[i] = dist(rng);
    }
    out.emplace_back(spec, std::move(v));
  }
  return out;
}

/// Endpoints at t of every (datum, policy) pair started at t - depth.
inline std::vector<GridFunction> pullback_endpoints(double t, double depth,
                                                    std::span<const GridFunction> data,
                                                    std::span<const SelectionPolicy> policies,
                                                    const Scheme& scheme, std::size_t jobs = 1) {
  const std::size_t n_pre = step_count(depth, scheme.dt());
  const double s = t - static_cast<double>(n_pre) * scheme.dt();
  const std::size_t np = policies.size();
  return parallel_map(jobs, data.size() * np, [&](std::size_t idx) {
    return scheme.run(data[idx / np], s, n_pre, policies[idx % np]).first;
  });
}

/// Pullback sample from explicit initial data: endpoint sets at successively
/// deeper starts until two consecutive ones are within `tol` in both
/// Hausdorff semidistances.
inline AttractorSample pullback_attractor_sample_from(double t, std::span<const GridFunction> data,
                                                      const CoefficientProfile& profile,
                                                      const GridSpec& spec, double dt,
                                                      std::span<const SelectionPolicy> policies,
                                                      const HorizonSchedule& schedule, double tol,
                                                      std::size_t jobs = 1) {
  schedule.check();
  if (data.empty()) throw UsageError("pullback_attractor_sample: no initial data");
  if (policies.empty()) throw UsageError("pullback_attractor_sample: no policies");
  if (!(tol > 0.0)) throw UsageError("pullback_attractor_sample: tol must be positive");
  const Scheme scheme(profile, spec, dt);
  AttractorSample out;
  out.t = t;
  out.seed_count = data.size();
  std::vector<GridFunction> previous;
  for (double depth : schedule.depths) {
    auto current = pullback_endpoints(t, depth, data, policies, scheme, jobs);
    if (!previous.empty()) {
      const double gap = hausdorff_distance(previous, current);
      out.gap_history.push_back(gap);
      if (gap < tol) {
        out.members = std::move(current);
        out.horizon_used = t - static_cast<double>(step_count(depth, dt)) * dt;
        return out;
      }
    }
    previous = std::move(current);
  }
  throw ConvergenceError("pullback_attractor_sample: horizon exhausted at t = " +
                             std::to_string(t) + ", last gap " +
                             std::to_string(out.gap_history.empty() ? -1.0
                                                                    : out.gap_history.back()),
                         out.gap_history);
}

inline AttractorSample pullback_attractor_sample(double t, const CoefficientProfile& profile,
                                                 const GridSpec& spec, double dt,
                                                 const SamplingConfig& cfg) {
  if (cfg.n_seeds == 0) throw UsageError("pullback_attractor_sample: n_seeds must be >= 1");
  const auto data = draw_seeds(profile, spec, cfg.n_seeds, cfg.seed);
  return pullback_attractor_sample_from(t, data, profile, spec, dt, cfg.policies, cfg.schedule,
                                        cfg.tol, cfg.jobs);
}

struct AttractionPoint {
  double depth = 0.0;
  double s = 0.0;
  double distance = 0.0;
};

/// dist(U(t, t - depth, probes), target) for each depth.
inline std::vector<AttractionPoint> attraction_curve(double t, std::span<const GridFunction> probes,
                                                     std::span<const SelectionPolicy> policies,
                                                     std::span<const double> depths,
                                                     std::span<const GridFunction> target,
                                                     const Scheme& scheme, std::size_t jobs = 1) {
  std::vector<AttractionPoint> out;
  for (double depth : depths) {
    const auto ends = pullback_endpoints(t, depth, probes, policies, scheme, jobs);
    const double s = t - static_cast<double>(step_count(depth, scheme.dt())) * scheme.dt();
    out.push_back({depth, s, hausdorff_semidist(ends, target)});
  }
  return out;
}

struct StructureReport {
  /// max interval_distance of sample members to [gamma_lo(t), gamma_hi(t)].
  double sandwich_violation = 0.0;
  /// sup |gamma_lo + gamma_hi| over the window.
  double symmetry_defect = 0.0;
  /// sup of (v₁⁺(b₀,ω₀) - gamma_hi)⁺.
  double bound_defect_lower = 0.0;
  /// sup of (gamma_hi - v₁⁺(b₁,ω₁))⁺.
  double bound_defect_upper = 0.0;
  /// Distance of the upper-policy probe trajectory to gamma_hi(t_min).
  std::vector<AttractionPoint> attraction_curve;
};

/// Collects the defects of the structure statements for a computed pair. The
/// comparison equilibria are the discrete ones. The probe is started at
/// window.t_min - depth for every depth and compared with gamma_hi(t_min);
/// it should lie above gamma_hi for the curve to measure stability from above.
inline StructureReport structure_report(const ExtremalPair& pair,
                                        std::span<const AttractorSample> samples,
                                        const EquilibriumParams& params_low,
                                        const EquilibriumParams& params_high,
                                        const CoefficientProfile& profile,
                                        const GridFunction& probe,
                                        std::span<const double> probe_depths) {
  StructureReport r;
  const GridSpec& spec = pair.gamma_hi.front().spec();
  for (const auto& sample : samples) {
    const auto interval = pair.interval_at(sample.t);
    for (const auto& m : sample.members) {
      r.sandwich_violation = std::max(r.sandwich_violation, interval_distance(m, interval));
    }
  }
  const GridFunction low = discrete_equilibrium(params_low, spec);
  const GridFunction high = discrete_equilibrium(params_high, spec);
  for (std::size_t k = 0; k < pair.gamma_hi.size(); ++k) {
    const auto& hi = pair.gamma_hi[k];
    const auto& lo = pair.gamma_lo[k];
    for (std::size_t i = 0; i < hi.size(); ++i) {
      r.symmetry_defect = std::max(r.symmetry_defect, std::abs(lo[i] + hi[i]));
      r.bound_defect_lower = std::max(r.bound_defect_lower, low[i] - hi[i]);
      r.bound_defect_upper = std::max(r.bound_defect_upper, hi[i] - high[i]);
    }
  }
  const Scheme scheme(profile, spec, pair.dt);
  const std::vector<GridFunction> target{pair.gamma_hi.front()};
  const std::vector<GridFunction> probes{probe};
  const std::vector<SelectionPolicy> upper{SelectionPolicy::upper()};
  r.attraction_curve =
      attraction_curve(pair.window.t_min, probes, upper, probe_depths, target, scheme);
  return r;
}

struct AsymptoticRow {
  double t = 0.0;
  /// dist(Â(t), Â): semidistance of the nonautonomous sample to the limit sample.
  double dist_attractor = 0.0;
  /// sup |gamma_hi(t) - v₁⁺(limit)|.
  double dist_gamma = 0.0;
  /// sup |gamma_lo(t) + gamma_hi(t)|.
  double symmetry_defect = 0.0;
  double horizon_used = 0.0;
};

struct AsymptoticTable {
  std::vector<AsymptoticRow> rows;
  AttractorSample limit_sample;
  double gamma_horizon_used = 0.0;

  /// Both distance columns non-increasing up to `slack`.
  bool non_increasing(double slack) const {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k].dist_attractor > rows[k - 1].dist_attractor + slack) return false;
      if (rows[k].dist_gamma > rows[k - 1].dist_gamma + slack) return false;
    }
    return true;
  }
};

/// Compares pullback samples of an asymptotically autonomous profile at each
/// checkpoint against a forward sample of the limit problem drawn from the same
/// initial data, and tracks gamma_hi(t) against the limit equilibrium.
inline AsymptoticTable asymptotic_experiment(const CoefficientProfile& profile,
                                             const EquilibriumParams& limit_params,
                                             const GridSpec& spec, double dt,
                                             std::span<const double> checkpoints,
                                             const SamplingConfig& sampling) {
  if (!profile.is_asymptotically_autonomous()) {
    throw UsageError("asymptotic_experiment: profile declares no asymptotic limits");
  }
  if (*profile.b_inf() != limit_params.b || *profile.omega_inf() != limit_params.omega) {
    throw UsageError("asymptotic_experiment: limit_params differ from the profile's limits");
  }
  if (checkpoints.empty()) throw UsageError("asymptotic_experiment: no checkpoints");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw UsageError("asymptotic_experiment: checkpoints must be sorted");
  }
  const auto limit_profile = CoefficientProfile::constant(limit_params.b, limit_params.omega);
  const auto data = draw_seeds(profile, spec, sampling.n_seeds, sampling.seed);

  AsymptoticTable table;
  table.limit_sample = pullback_attractor_sample_from(0.0, data, limit_profile, spec, dt,
                                                      sampling.policies, sampling.schedule,
                                                      sampling.tol, sampling.jobs);
  // A single window spanning all checkpoints; the stride lands on every integer-step checkpoint.
  const Window window{checkpoints.front(), checkpoints.back()};
  const auto pair =
      extremal_trajectories(window, dt, profile, spec, sampling.tol, sampling.schedule);
  table.gamma_horizon_used = pair.horizon_used;
  const GridFunction limit_eq = discrete_equilibrium(limit_params, spec);
  for (double t : checkpoints) {
    const auto sample = pullback_attractor_sample_from(t, data, profile, spec, dt,
                                                       sampling.policies, sampling.schedule,
                                                       sampling.tol, sampling.jobs);
    AsymptoticRow row;
    row.t = t;
    row.dist_attractor = hausdorff_semidist(sample.members, table.limit_sample.members);
    row.dist_gamma = sup_distance(pair.hi_at(t), limit_eq);
    row.symmetry_defect = sup_norm(pair.lo_at(t) + pair.hi_at(t));
    row.horizon_used = sample.horizon_used;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace plab
