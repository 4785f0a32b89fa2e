// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/backend.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>

namespace ace {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{250};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{4000};

  /// Delay before attempt `attempt` (1-based; attempt 1 has no delay).
  std::chrono::milliseconds delay_before(int attempt) const;
};

struct HttpBackendConfig {
  std::string api_base;  // e.g. "http://localhost:8000/v1"
  std::string api_key;
  std::string model;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  std::size_t max_in_flight = 0;  // 0 = unlimited

  /// Reads ACE_API_BASE, ACE_API_KEY and ACE_MODEL; unset variables leave
  /// the field empty.
  static HttpBackendConfig from_env();
};

/// Chat-completions client (POST {api_base}/chat/completions).
///
/// Transport failures, 429 and 5xx responses are retried with capped
/// exponential backoff up to `retry.max_attempts` total attempts. Other
/// non-2xx statuses fail immediately. Provider usage is returned as-is;
/// when the response has no usage block both sides are estimated with
/// count_tokens().
class HttpBackend final : public LlmBackend {
public:
  explicit HttpBackend(HttpBackendConfig config);

  Completion complete(const CompletionRequest& request) override;

  /// Transport-level calls issued so far (every attempt counts).
  std::size_t attempts() const noexcept { return attempts_.load(); }

  const HttpBackendConfig& config() const noexcept { return config_; }

private:
  class Slot;

  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::atomic<std::size_t> attempts_{0};

  std::mutex gate_mutex_;
  std::condition_variable gate_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace ace
