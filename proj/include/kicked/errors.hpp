#pragma once

#include <stdexcept>
#include <string>

namespace kicked {

/// Invalid run configuration (bad key, missing field, out-of-range value).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical result could not be brought within its stated tolerance.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature or transform grid too coarse for the requested accuracy.
class ResolutionError : public ToleranceError {
 public:
  explicit ResolutionError(const std::string& what) : ToleranceError(what) {}
};

/// Probability (or norm) left the truncated momentum lattice.
class LatticeOverflow : public std::runtime_error {
 public:
  LatticeOverflow(const std::string& what, long required_half_width)
      : std::runtime_error(what), required_half_width_(required_half_width) {}

  long required_half_width() const noexcept { return required_half_width_; }

 private:
  long required_half_width_;
};

}  // namespace kicked
