#pragma once

// Discrete state space: nodal functions on a uniform grid of (0,1) with
// homogeneous Dirichlet data. Boundary values are implicit zeros and are
// never stored.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plab/error.hpp"

namespace plab {

class GridSpec {
 public:
  explicit GridSpec(std::size_t n_interior) : n_(n_interior) {
    if (n_ == 0) throw UsageError("GridSpec: n_interior must be at least 1");
  }

  std::size_t n_interior() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_ + 1); }
  /// Abscissa of interior node i (0-based), i.e. (i+1)·h.
  double node(std::size_t i) const noexcept {
    return static_cast<double>(i + 1) / static_cast<double>(n_ + 1);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t n_;
};

class GridFunction {
 public:
  /// Zero function on the grid.
  explicit GridFunction(GridSpec spec) : spec_(spec), values_(spec.n_interior(), 0.0) {}

  GridFunction(GridSpec spec, std::vector<double> values)
      : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.n_interior()) {
      throw UsageError("GridFunction: expected " + std::to_string(spec_.n_interior()) +
                       " interior values, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw UsageError("GridFunction: non-finite value");
    }
  }

  GridFunction(GridSpec spec, std::initializer_list<double> values)
      : GridFunction(spec, std::vector<double>(values)) {}

  /// Samples a callable at the interior nodes.
  template <typename F>
  static GridFunction sample(GridSpec spec, F&& f) {
    std::vector<double> v(spec.n_interior());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::invoke(f, spec.node(i));
    return GridFunction(spec, std::move(v));
  }

  static GridFunction constant(GridSpec spec, double c) {
    return GridFunction(spec, std::vector<double>(spec.n_interior(), c));
  }

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

  GridFunction operator-() const {
    GridFunction r = *this;
    for (double& v : r.values_) v = -v;
    return r;
  }

  /// Componentwise map with a binary op against another function.
  template <typename Op>
  GridFunction zip(const GridFunction& other, Op op) const {
    require_same_spec(other, "zip");
    std::vector<double> r(values_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = op(values_[i], other.values_[i]);
    return GridFunction(spec_, std::move(r));
  }

  template <typename Op>
  GridFunction map(Op op) const {
    std::vector<double> r(values_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = op(values_[i]);
    return GridFunction(spec_, std::move(r));
  }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return a.zip(b, std::plus<>{});
  }
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return a.zip(b, std::minus<>{});
  }
  friend GridFunction operator*(double c, const GridFunction& a) {
    return a.map([c](double v) { return c * v; });
  }

  void require_same_spec(const GridFunction& other, const char* where) const {
    if (!(spec_ == other.spec_)) {
      throw UsageError(std::string(where) + ": grid spec mismatch (" +
                       std::to_string(spec_.n_interior()) + " vs " +
                       std::to_string(other.spec_.n_interior()) + " interior nodes)");
    }
  }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Exact componentwise order u ≤ v. No tolerance.
inline bool leq(const GridFunction& u, const GridFunction& v) {
  u.require_same_spec(v, "leq");
  auto a = u.values();
  auto b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] <= b[i])) return false;
  }
  return true;
}

/// Discrete L² distance sqrt(h Σ (u_i - v_i)²).
inline double metric(const GridFunction& u, const GridFunction& v) {
  u.require_same_spec(v, "metric");
  auto a = u.values();
  auto b = v.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(u.spec().h() * s);
}

/// Sup-norm distance; diagnostic companion to metric().
inline double sup_distance(const GridFunction& u, const GridFunction& v) {
  u.require_same_spec(v, "sup_distance");
  auto a = u.values();
  auto b = v.values();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

inline GridFunction meet(const GridFunction& u, const GridFunction& v) {
  return u.zip(v, [](double a, double b) { return std::min(a, b); });
}

inline GridFunction join(const GridFunction& u, const GridFunction& v) {
  return u.zip(v, [](double a, double b) { return std::max(a, b); });
}

/// Closed order interval [lower, upper].
class OrderInterval {
 public:
  OrderInterval(GridFunction lower, GridFunction upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!leq(lower_, upper_)) throw UsageError("OrderInterval: lower is not <= upper");
  }

  const GridFunction& lower() const noexcept { return lower_; }
  const GridFunction& upper() const noexcept { return upper_; }

  bool contains(const GridFunction& y) const { return leq(lower_, y) && leq(y, upper_); }

  /// Componentwise projection onto the interval.
  GridFunction clamp(const GridFunction& y) const {
    y.require_same_spec(lower_, "OrderInterval::clamp");
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = std::max(lower_[i], std::min(y[i], upper_[i]));
    }
    return GridFunction(y.spec(), std::move(r));
  }

 private:
  GridFunction lower_;
  GridFunction upper_;
};

/// metric(y, clamp(y, I)); zero exactly when y ∈ I.
inline double interval_distance(const GridFunction& y, const OrderInterval& interval) {
  return metric(y, interval.clamp(y));
}

/// Smallest order interval containing every member of a non-empty set.
inline OrderInterval bounding_interval(std::span<const GridFunction> set) {
  if (set.empty()) throw UsageError("bounding_interval: empty set");
  GridFunction lo = set.front();
  GridFunction hi = set.front();
  for (const auto& u : set.subspan(1)) {
    lo = meet(lo, u);
    hi = join(hi, u);
  }
  return OrderInterval(std::move(lo), std::move(hi));
}

/// Hausdorff semidistance sup_{b∈B} inf_{a∈A} metric(b, a). Not symmetric.
inline double hausdorff_semidist(std::span<const GridFunction> from,
                                 std::span<const GridFunction> to) {
  if (from.empty() || to.empty()) throw UsageError("hausdorff_semidist: empty set");
  double worst = 0.0;
  for (const auto& b : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : to) {
      best = std::min(best, metric(b, a));
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

/// max of both semidistances.
inline double hausdorff_distance(std::span<const GridFunction> a, std::span<const GridFunction> b) {
  return std::max(hausdorff_semidist(a, b), hausdorff_semidist(b, a));
}

/// Strictly positive at every interior node.
inline bool is_nondegenerate(const GridFunction& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](double v) { return v > 0.0; });
}

}  // namespace plab
