#pragma once

#include <stdexcept>
#include <string>

namespace fdrrt {

/// Bad scenario files, mismatched artifacts, invalid parameters.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A planning stage that legitimately failed (roadmap pair unsolvable,
/// perturbation retries exhausted). CLI exit code 1.
class PlanningFailure : public std::runtime_error {
 public:
  explicit PlanningFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdrrt
