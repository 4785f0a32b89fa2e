// SPDX-License-Identifier: Apache-2.0
//
// Backend decorator that sums the usage of every completion it forwards.
// Tests compare its tally against the totals the engine reports.
#pragma once

#include <ace/backend.hpp>

#include <mutex>

namespace ace::testing {

class UsageTap final : public LlmBackend {
public:
  explicit UsageTap(LlmBackend& inner) : inner_(inner) {}

  Completion complete(const CompletionRequest& request) override {
    auto c = inner_.complete(request);
    std::lock_guard lock(mutex_);
    tally_ += c.usage;
    ++calls_;
    return c;
  }

  TokenUsage tally() const {
    std::lock_guard lock(mutex_);
    return tally_;
  }
  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

private:
  LlmBackend& inner_;
  mutable std::mutex mutex_;
  TokenUsage tally_;
  std::size_t calls_ = 0;
};

}  // namespace ace::testing
