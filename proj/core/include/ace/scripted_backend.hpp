// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/backend.hpp>

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace ace {

struct ScriptedRule {
  std::optional<CallTag> tag;  // nullopt matches every tag
  std::string match;           // substring of the prompt; empty matches everything
  bool regex = false;          // treat `match` as an ECMAScript regex (search)
  std::optional<std::int64_t> seed;
  std::string response;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
  bool fail = false;  // raise a BackendError instead of responding

  std::shared_ptr<const std::regex> compiled;  // filled in by ScriptedRuleSet::add

  bool matches(const CompletionRequest& request) const;
};

/// Ordered rules; the first match wins.
///
/// File format, one JSON object per line (blank lines and lines starting
/// with '#' are ignored):
///
///   {"tag": "Decide", "match": "capital of", "seed": 2, "response": "RETRIEVE",
///    "prompt_tokens": 10, "completion_tokens": 1}
///   {"default_response": "I don't know"}
///
/// `tag` may be omitted or "*"; a `match` prefixed with "re:" is a regex.
struct ScriptedRuleSet {
  std::vector<ScriptedRule> rules;
  std::string default_response;

  /// Appends a rule, compiling its regex if needed.
  ScriptedRuleSet& add(ScriptedRule rule);

  static ScriptedRuleSet parse(std::istream& in);
  static ScriptedRuleSet load(const std::filesystem::path& path);
};

/// Deterministic backend driven by a rule set. Thread-safe; the rule set is
/// immutable after construction.
class ScriptedBackend final : public LlmBackend {
public:
  explicit ScriptedBackend(ScriptedRuleSet rules, bool record_requests = false);

  Completion complete(const CompletionRequest& request) override;

  std::size_t call_count() const noexcept { return calls_.load(); }
  std::size_t call_count(CallTag tag) const noexcept;

  /// Requests received so far, in arrival order (only if recording).
  std::vector<CompletionRequest> recorded_requests() const;

  const ScriptedRuleSet& rules() const noexcept { return rules_; }

private:
  ScriptedRuleSet rules_;
  bool record_;
  std::atomic<std::size_t> calls_{0};
  std::array<std::atomic<std::size_t>, 5> per_tag_{};
  mutable std::mutex mutex_;
  std::vector<CompletionRequest> recorded_;
};

}  // namespace ace
