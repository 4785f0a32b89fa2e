// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ace {

/// Which step of the loop issued a completion; used for tracing and by the
/// scripted backend's rule matching.
enum class CallTag { Decide, SubQuery, SubAnswer, FinalAnswer, QueryRewrite };

std::string_view to_string(CallTag tag);
std::optional<CallTag> parse_call_tag(std::string_view name);

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  std::int64_t total() const noexcept { return prompt_tokens + completion_tokens; }

  TokenUsage& operator+=(const TokenUsage& other) noexcept {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) noexcept { return a += b; }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  std::int64_t seed = 0;
  int max_tokens = 256;
  CallTag tag = CallTag::Decide;
};

/// Throws InvalidArgument for a blank prompt, negative temperature or
/// non-positive max_tokens.
void validate(const CompletionRequest& request);

struct Completion {
  std::string text;
  TokenUsage usage;
};

/// An LLM completion provider. Implementations must tolerate concurrent
/// complete() calls.
class LlmBackend {
public:
  virtual ~LlmBackend() = default;

  virtual Completion complete(const CompletionRequest& request) = 0;
};

/// Whitespace-token count. An approximation, used only when a provider
/// does not report usage.
std::size_t count_tokens(std::string_view text);

}  // namespace ace
