#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plab {

/// Caller broke a precondition (mismatched grids, empty sets, bad junctions).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coefficient profile or scenario failed an admissibility check.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative pullback construction ran out of horizon before its gap fell
/// below tolerance. Carries the gap recorded at every depth that was tried.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> gaps)
      : std::runtime_error(what), gaps_(std::move(gaps)) {}

  const std::vector<double>& gaps() const noexcept { return gaps_; }
  double last_gap() const noexcept { return gaps_.empty() ? 0.0 : gaps_.back(); }

 private:
  std::vector<double> gaps_;
};

/// Malformed or inconsistent scenario configuration. The message names the
/// offending line or key.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plab
