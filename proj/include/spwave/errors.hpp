#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spwave {

/// Invalid parameters or configuration. Carries every violation found, each
/// prefixed by the key path it refers to.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::string message)
      : std::runtime_error(message), violations_{std::move(message)} {}

  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// A coefficient became non-finite or exceeded the blow-up threshold.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, std::size_t mode, double value)
      : std::runtime_error(what), time_(time), mode_(mode), value_(value) {}

  double time() const noexcept { return time_; }
  std::size_t mode() const noexcept { return mode_; }
  double value() const noexcept { return value_; }

 private:
  double time_;
  std::size_t mode_;
  double value_;
};

/// Mismatched grids, bases or sample times between objects that must agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rate fit impossible: fewer than three distinct points or a non-positive
/// error (reported as below the noise floor).
class RateFitError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace spwave
