#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "plab/error.hpp"

namespace plab {

/// Solves the symmetric Toeplitz tridiagonal system with constant diagonal
/// `diag` and constant off-diagonal `off` by forward elimination and back
/// substitution (Thomas algorithm). `rhs` is overwritten with the solution.
///
/// The elimination only touches `rhs` through products and differences, so a
/// negated right-hand side yields the exactly negated solution.
inline void solve_toeplitz_tridiagonal(double diag, double off, std::span<double> rhs,
                                       std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  if (n == 0) return;
  scratch.resize(n);
  double pivot = diag;
  if (!(pivot != 0.0)) throw UsageError("tridiagonal solve: zero pivot");
  scratch[0] = off / pivot;
  rhs[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag - off * scratch[i - 1];
    // Strict diagonal dominance keeps every pivot positive.
    assert(pivot > 0.0);
    if (!(pivot != 0.0)) throw UsageError("tridiagonal solve: zero pivot");
    scratch[i] = off / pivot;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace plab
