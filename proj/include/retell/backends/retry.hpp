#pragma once

#include <chrono>
#include <thread>

#include "retell/core/error.hpp"

namespace retell::backends {

struct RetryPolicy {
  int retries = 2;  // extra attempts after the first
  std::chrono::milliseconds initial_backoff{50};
};

// Calls `fn`, retrying retryable BackendErrors with exponential backoff.
template <typename Fn>
auto with_retry(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  auto backoff = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= policy.retries) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace retell::backends
