#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levylab {

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An adaptive integral failed to reach its tolerance. Carries the estimates
/// of the pieces that were computed so the caller can see where it broke.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string &what, std::vector<double> partials)
      : std::runtime_error(what), partials_(std::move(partials)) {}
  const std::vector<double> &partial_estimates() const { return partials_; }

private:
  std::vector<double> partials_;
};

/// A numerical result could not be certified (e.g. the tail of an integral
/// dominates); enlarge the grid and retry.
class InconclusiveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace levylab
