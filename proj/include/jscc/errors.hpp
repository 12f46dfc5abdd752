#pragma once

#include <stdexcept>
#include <string>

namespace jscc {

/// Invalid run configuration (bad key, bad value, inconsistent dimensions).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// An estimator could not produce a result at the requested scale
/// (for example, too few usable points for a slope fit).
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// File-system level failure while reading or writing results.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jscc
