#pragma once

#include <stdexcept>
#include <string>

namespace swarmnav {

/// Broad failure classes. The CLI maps these onto process exit codes, so the
/// category of an error is part of the library contract, not just its text.
enum class ErrorCategory {
  config,     // invalid configuration or scenario input
  capacity,   // a feasible placement/request cannot be satisfied
  model,      // model file incompatible with the requested run
  io,         // file read/write failure
  internal,   // invariant broken inside the library
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::capacity: return "capacity";
    case ErrorCategory::model: return "model";
    case ErrorCategory::io: return "io";
    case ErrorCategory::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(std::string(to_string(category)) + ": " + message),
        category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& msg) {
  throw Error(c, msg);
}

/// Cheap runtime guard for caller-facing preconditions.
inline void require(bool ok, ErrorCategory c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace swarmnav
