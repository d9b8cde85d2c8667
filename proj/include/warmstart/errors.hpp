#pragma once

#include <stdexcept>
#include <string>

namespace warmstart {

// Bad input from a caller: dimension mismatches, out-of-range parameters,
// malformed files. The CLI maps these to exit status 1.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A size cap on an exact enumerator or exact baseline was exceeded.
class CapExceeded : public UsageError {
 public:
  explicit CapExceeded(const std::string& what) : UsageError(what) {}
};

// A simulator self-check failed. The CLI maps these to exit status 2.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw UsageError(msg);
}

inline void ensure(bool cond, const std::string& msg) {
  if (!cond) throw InvariantViolation(msg);
}

}  // namespace warmstart
