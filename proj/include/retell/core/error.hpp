#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace retell {

// Machine-readable failure classes. The service maps them to HTTP statuses.
enum class ErrorCode {
  invalid_argument,      // precondition / contract violation
  empty_input,
  not_found,
  protocol,              // out-of-order session operation
  session_complete,
  session_expired,
  material_inconsistency,
  generation_failed,
  calibration,
  degenerate_input,
  backend,               // adapter failure after retries
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::session_complete: return "session_complete";
    case ErrorCode::session_expired: return "session_expired";
    case ErrorCode::material_inconsistency: return "material_inconsistency";
    case ErrorCode::generation_failed: return "generation_failed";
    case ErrorCode::calibration: return "calibration";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::backend: return "backend";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by backend adapters. `retryable` tells callers whether another
// attempt may succeed (transport errors) or not (malformed responses).
class BackendError : public Error {
 public:
  BackendError(std::string backend, const std::string& message, bool retryable = true)
      : Error(ErrorCode::backend, backend + ": " + message),
        backend_(std::move(backend)),
        retryable_(retryable) {}

  const std::string& backend() const noexcept { return backend_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  std::string backend_;
  bool retryable_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::invalid_argument, message);
}

}  // namespace retell
