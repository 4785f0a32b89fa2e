// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/backend.hpp>
#include <ace/committee.hpp>
#include <ace/errors.hpp>
#include <ace/memory.hpp>
#include <ace/prompts.hpp>
#include <ace/reasoner.hpp>
#include <ace/retriever.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ace {

enum class PolicyMode { Vote, AlwaysRetrieve, AlwaysThink, FixedSchedule };

struct EpisodePolicy {
  PolicyMode mode = PolicyMode::Vote;
  std::vector<Action> schedule;     // FixedSchedule only; one action per round
  bool force_first_retrieve = true; // Vote mode: round 0 retrieves without voting
  bool early_stop = false;          // stop after a round that added nothing

  /// "vote", "always-retrieve", "always-think" or "schedule:R,T,T,R".
  static EpisodePolicy parse(std::string_view text);
  std::string describe() const;

  /// Throws InvalidArgument if a FixedSchedule's length differs from `rounds`.
  void validate(int rounds) const;
};

enum class QueryMode { Deterministic, LlmRewrite };

struct RoundTrace {
  int round = 0;
  std::vector<Vote> votes;  // empty when the policy decided
  Action action = Action::Retrieve;
  std::string search_query;  // RETRIEVE rounds only
  std::vector<std::string> items_added;
  std::size_t memory_before = 0;
  std::size_t memory_after = 0;
  TokenUsage usage;
};

struct EpisodeResult {
  std::string question_id;
  std::string question;
  FinalAnswer answer;
  std::vector<RoundTrace> rounds;
  TokenUsage total_usage;      // rounds + answer + aborted_usage
  TokenUsage aborted_usage;    // spent inside a round that then failed
  int think_count = 0;
  int retrieve_count = 0;
  std::optional<std::string> error;  // set on aborted episodes
  WorkingMemory final_memory;

  double think_percent() const;
};

/// Everything a round needs besides the state. The backend and retriever
/// are borrowed and must outlive the episode.
struct EpisodeDeps {
  LlmBackend* backend = nullptr;
  const Retriever* retriever = nullptr;
  std::size_t top_k = 5;
  PromptSet prompts = PromptSet::defaults();
  RenderConfig render;
  GenerationParams generation;
  QueryMode query_mode = QueryMode::Deterministic;
};

/// Raised when an episode aborts; partial() holds every completed round and
/// the tokens spent so far, including those of a failed round's votes.
class EpisodeError : public Error {
public:
  EpisodeError(const std::string& what, EpisodeResult partial)
      : Error(what), partial_(std::move(partial)) {}

  const EpisodeResult& partial() const noexcept { return partial_; }

private:
  EpisodeResult partial_;
};

/// A round failed part-way; partial() holds the votes gathered and the
/// usage spent before the failure.
class StepError : public Error {
public:
  StepError(const std::string& what, RoundTrace partial)
      : Error(what), partial_(std::move(partial)) {}

  const RoundTrace& partial() const noexcept { return partial_; }

private:
  RoundTrace partial_;
};

struct StepOutcome {
  AceState state;
  RoundTrace trace;
};

/// One decision-action cycle: choose the action per policy, execute it,
/// union the result into memory and advance the round. Failures inside the
/// round surface as StepError.
StepOutcome step(const AceState& state, const CommitteeConfig& committee,
                 const EpisodePolicy& policy, const EpisodeDeps& deps);

/// M_0 = {Q}; `rounds` steps; final answer from M_N. rounds == 0 answers
/// directly from M_0.
EpisodeResult run_episode(std::string_view question, int rounds, const CommitteeConfig& committee,
                          const EpisodePolicy& policy, const EpisodeDeps& deps);

}  // namespace ace
