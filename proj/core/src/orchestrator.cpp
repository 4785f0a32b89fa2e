// SPDX-License-Identifier: Apache-2.0
#include <ace/orchestrator.hpp>

#include <ace/text.hpp>

#include <exception>

namespace ace {

double EpisodeResult::think_percent() const {
  const int n = think_count + retrieve_count;
  return n == 0 ? 0.0 : 100.0 * think_count / n;
}

EpisodePolicy EpisodePolicy::parse(std::string_view text) {
  const auto folded = text::casefold(text::trim(text));
  EpisodePolicy policy;
  if (folded == "vote") {
    policy.mode = PolicyMode::Vote;
  } else if (folded == "always-retrieve") {
    policy.mode = PolicyMode::AlwaysRetrieve;
  } else if (folded == "always-think") {
    policy.mode = PolicyMode::AlwaysThink;
  } else if (folded.rfind("schedule:", 0) == 0) {
    policy.mode = PolicyMode::FixedSchedule;
    std::string_view rest = std::string_view(folded).substr(9);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto label = rest.substr(0, comma);
      const auto action = parse_action(label);
      if (!action) throw InvalidArgument("unknown action '" + std::string(label) + "' in schedule");
      policy.schedule.push_back(*action);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else {
    throw InvalidArgument("unknown policy '" + std::string(text) +
                          "' (expected vote, always-retrieve, always-think or schedule:R,T,...)");
  }
  return policy;
}

std::string EpisodePolicy::describe() const {
  switch (mode) {
    case PolicyMode::Vote: return "vote";
    case PolicyMode::AlwaysRetrieve: return "always-retrieve";
    case PolicyMode::AlwaysThink: return "always-think";
    case PolicyMode::FixedSchedule: {
      std::string out = "schedule:";
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i > 0) out += ",";
        out += schedule[i] == Action::Retrieve ? "R" : "T";
      }
      return out;
    }
  }
  return {};
}

void EpisodePolicy::validate(int rounds) const {
  if (mode == PolicyMode::FixedSchedule && schedule.size() != static_cast<std::size_t>(rounds)) {
    throw InvalidArgument("fixed schedule has " + std::to_string(schedule.size()) +
                          " actions but the episode runs " + std::to_string(rounds) + " rounds");
  }
}

StepOutcome step(const AceState& state, const CommitteeConfig& committee,
                 const EpisodePolicy& policy, const EpisodeDeps& deps) {
  if (state.round >= state.budget) throw InvalidArgument("round budget exhausted");
  if (deps.backend == nullptr) throw InvalidArgument("episode has no backend");

  RoundTrace trace;
  trace.round = state.round;
  trace.memory_before = state.memory.size();
  const int next_round = state.round + 1;

  try {
    switch (policy.mode) {
      case PolicyMode::Vote:
        if (policy.force_first_retrieve && state.round == 0) {
          trace.action = Action::Retrieve;
        } else {
          try {
            trace.votes = collect_votes(*deps.backend, state.memory, state.question, committee,
                                        deps.prompts, deps.render);
          } catch (const CommitteeError& e) {
            trace.votes = e.partial_votes();
            for (const auto& v : trace.votes) trace.usage += v.usage;
            throw;
          }
          for (const auto& v : trace.votes) trace.usage += v.usage;
          trace.action = majority_vote(std::span<const Vote>(trace.votes), committee.tie_break);
        }
        break;
      case PolicyMode::AlwaysRetrieve: trace.action = Action::Retrieve; break;
      case PolicyMode::AlwaysThink: trace.action = Action::Think; break;
      case PolicyMode::FixedSchedule:
        trace.action = policy.schedule.at(static_cast<std::size_t>(state.round));
        break;
    }

    std::vector<MemoryItem> items;
    if (trace.action == Action::Retrieve) {
      if (deps.retriever == nullptr) throw InvalidArgument("RETRIEVE round without a retriever");
      if (deps.query_mode == QueryMode::LlmRewrite) {
        auto rewritten = rewrite_query(*deps.backend, state.memory, state.question, deps.prompts,
                                       deps.generation, deps.render);
        trace.usage += rewritten.usage;
        trace.search_query = std::move(rewritten.query);
      } else {
        trace.search_query = formulate_query(state.memory, state.question);
      }
      for (auto& p : deps.retriever->search({trace.search_query, deps.top_k})) {
        items.push_back(MemoryItem::passage(std::move(p), next_round));
      }
    } else {
      auto outcome = think(*deps.backend, state.memory, state.question, deps.prompts,
                           deps.generation, deps.render);
      trace.usage += outcome.usage;
      items.push_back(MemoryItem::thought(std::move(outcome.thought), next_round));
    }

    auto merged = union_insert(state.memory, items);
    StepOutcome out{state, std::move(trace)};
    out.state.memory = std::move(merged.memory);
    const auto added = out.state.memory.items().last(merged.inserted);
    for (const auto& item : added) out.trace.items_added.push_back(item.summary());
    out.trace.memory_after = out.state.memory.size();
    out.state.round = next_round;
    out.state.actions_taken.push_back(out.trace.action);
    return out;
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    trace.memory_after = trace.memory_before;
    throw StepError(e.what(), std::move(trace));
  }
}

EpisodeResult run_episode(std::string_view question, int rounds, const CommitteeConfig& committee,
                          const EpisodePolicy& policy, const EpisodeDeps& deps) {
  if (rounds < 0) throw InvalidArgument("round budget must be non-negative");
  if (deps.backend == nullptr) throw InvalidArgument("episode has no backend");
  if (policy.mode == PolicyMode::Vote) committee.validate();
  policy.validate(rounds);

  auto state = initial_state(question, rounds, committee.k);
  EpisodeResult result;
  result.question = state.question;

  const auto aborted = [&](const std::exception& e) {
    result.error = e.what();
    result.final_memory = state.memory;
    return EpisodeError(e.what(), result);
  };

  try {
    while (state.round < state.budget) {
      auto out = step(state, committee, policy, deps);
      const bool stalled = out.trace.items_added.empty();
      (out.trace.action == Action::Think ? result.think_count : result.retrieve_count) += 1;
      result.total_usage += out.trace.usage;
      result.rounds.push_back(std::move(out.trace));
      state = std::move(out.state);
      if (policy.early_stop && stalled) break;
    }
    result.answer = answer(*deps.backend, state.memory, state.question, deps.prompts,
                           deps.generation, deps.render);
    result.total_usage += result.answer.usage;
  } catch (const StepError& e) {
    result.aborted_usage = e.partial().usage;
    result.total_usage += result.aborted_usage;
    throw aborted(e);
  } catch (const std::exception& e) {
    throw aborted(e);
  }

  result.final_memory = std::move(state.memory);
  return result;
}

}  // namespace ace
