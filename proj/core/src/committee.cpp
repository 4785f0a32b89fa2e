// SPDX-License-Identifier: Apache-2.0
#include <ace/committee.hpp>

#include <ace/text.hpp>

#include <exception>
#include <future>

namespace ace {

DecisionParse parse_decision(std::string_view response) {
  const bool retrieve = text::contains_word_icase(response, "retrieve");
  const bool think = text::contains_word_icase(response, "think");
  if (retrieve != think) return {think ? Action::Think : Action::Retrieve, true};
  return {Action::Retrieve, false};
}

CommitteeConfig CommitteeConfig::of_size(int k, std::int64_t base_seed) {
  CommitteeConfig config;
  config.k = k;
  config.agent_seeds.clear();
  for (int j = 0; j < k; ++j) config.agent_seeds.push_back(base_seed + j);
  return config;
}

void CommitteeConfig::validate() const {
  if (k < 1) throw InvalidArgument("committee size k must be >= 1");
  if (agent_seeds.size() != static_cast<std::size_t>(k)) {
    throw InvalidArgument("committee needs exactly k agent seeds");
  }
  if (sampling_temperature < 0.0) throw InvalidArgument("sampling temperature must be >= 0");
}

Vote agent_vote(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                int agent_id, const CommitteeConfig& config, const PromptSet& prompts,
                const RenderConfig& render) {
  if (agent_id < 0 || agent_id >= config.k) throw InvalidArgument("agent_id out of range");
  if (memory.question().empty()) throw InvalidArgument("memory holds no query item");

  CompletionRequest request;
  request.prompt = fill_template(prompts.decide,
                                 {{"Q", question}, {"M_i", render_memory(memory, render)}});
  request.temperature = config.sampling_temperature;
  request.seed = config.agent_seeds.at(static_cast<std::size_t>(agent_id));
  request.max_tokens = config.max_tokens;
  request.tag = CallTag::Decide;

  auto completion = backend.complete(request);
  const auto decision = parse_decision(completion.text);
  return Vote{agent_id, decision.action, decision.parsed, std::move(completion.text),
              completion.usage};
}

std::vector<Vote> collect_votes(LlmBackend& backend, const WorkingMemory& memory,
                                std::string_view question, const CommitteeConfig& config,
                                const PromptSet& prompts, const RenderConfig& render) {
  config.validate();
  if (memory.question().empty()) throw InvalidArgument("memory holds no query item");
  std::vector<Vote> votes;
  votes.reserve(static_cast<std::size_t>(config.k));

  if (!config.concurrent || config.k == 1) {
    for (int j = 0; j < config.k; ++j) {
      try {
        votes.push_back(agent_vote(backend, memory, question, j, config, prompts, render));
      } catch (const InvalidArgument&) {
        throw;
      } catch (const std::exception& e) {
        throw CommitteeError(j, e.what(), std::move(votes));
      }
    }
    return votes;
  }

  std::vector<std::future<Vote>> pending;
  pending.reserve(static_cast<std::size_t>(config.k));
  for (int j = 0; j < config.k; ++j) {
    pending.push_back(std::async(std::launch::async, [&, j] {
      return agent_vote(backend, memory, question, j, config, prompts, render);
    }));
  }

  // Barrier: wait for every agent before reporting the first failure.
  std::optional<std::pair<int, std::string>> failure;
  for (int j = 0; j < config.k; ++j) {
    try {
      votes.push_back(pending[static_cast<std::size_t>(j)].get());
    } catch (const std::exception& e) {
      if (!failure) failure.emplace(j, e.what());
    }
  }
  if (failure) throw CommitteeError(failure->first, failure->second, std::move(votes));
  return votes;
}

Action majority_vote(std::span<const Action> ballot, Action tie_break) {
  if (ballot.empty()) throw InvalidArgument("majority vote over an empty ballot");
  std::size_t think = 0;
  for (auto a : ballot) think += a == Action::Think ? 1 : 0;
  const std::size_t retrieve = ballot.size() - think;
  if (think == retrieve) return tie_break;
  return think > retrieve ? Action::Think : Action::Retrieve;
}

Action majority_vote(std::span<const Vote> votes, Action tie_break) {
  std::vector<Action> ballot;
  ballot.reserve(votes.size());
  for (const auto& v : votes) ballot.push_back(v.action);
  return majority_vote(std::span<const Action>(ballot), tie_break);
}

}  // namespace ace
