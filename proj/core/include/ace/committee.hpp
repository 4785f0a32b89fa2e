// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/backend.hpp>
#include <ace/errors.hpp>
#include <ace/memory.hpp>
#include <ace/prompts.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ace {

struct Vote {
  int agent_id = 0;
  Action action = Action::Retrieve;
  bool parsed = true;  // false when the response named both or neither action
  std::string raw_response;
  TokenUsage usage;
};

struct DecisionParse {
  Action action;
  bool parsed;
};

/// Case-insensitive whole-word scan for RETRIEVE and THINK. Exactly one of
/// them present decides the vote; both or neither default to RETRIEVE with
/// parsed = false.
DecisionParse parse_decision(std::string_view response);

struct CommitteeConfig {
  int k = 5;
  double sampling_temperature = 0.7;
  std::vector<std::int64_t> agent_seeds{0, 1, 2, 3, 4};
  int max_tokens = 16;
  bool concurrent = true;  // issue the k calls of a round in parallel
  Action tie_break = Action::Retrieve;

  /// k agents with seeds base_seed, base_seed + 1, ...
  static CommitteeConfig of_size(int k, std::int64_t base_seed = 0);

  /// Throws InvalidArgument unless k >= 1 and |agent_seeds| == k.
  void validate() const;
};

/// An agent call failed; carries the votes that did complete.
class CommitteeError : public Error {
public:
  CommitteeError(int agent_id, const std::string& cause, std::vector<Vote> partial_votes)
      : Error("agent " + std::to_string(agent_id) + ": " + cause),
        agent_id_(agent_id),
        partial_votes_(std::move(partial_votes)) {}

  int agent_id() const noexcept { return agent_id_; }
  const std::vector<Vote>& partial_votes() const noexcept { return partial_votes_; }

private:
  int agent_id_;
  std::vector<Vote> partial_votes_;
};

/// One agent's ballot: a single Decide completion with that agent's seed.
Vote agent_vote(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                int agent_id, const CommitteeConfig& config, const PromptSet& prompts,
                const RenderConfig& render = {});

/// Exactly k votes ordered by agent_id. Calls may run concurrently; this
/// returns only after all of them finished.
std::vector<Vote> collect_votes(LlmBackend& backend, const WorkingMemory& memory,
                                std::string_view question, const CommitteeConfig& config,
                                const PromptSet& prompts, const RenderConfig& render = {});

/// The action with strictly more votes; `tie_break` on an exact tie.
/// Throws InvalidArgument on an empty ballot.
Action majority_vote(std::span<const Action> ballot, Action tie_break = Action::Retrieve);
Action majority_vote(std::span<const Vote> votes, Action tie_break = Action::Retrieve);

}  // namespace ace
