// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/backend.hpp>
#include <ace/memory.hpp>
#include <ace/prompts.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace ace {

struct GenerationParams {
  double temperature = 0.0;
  std::int64_t seed = 0;
  int max_tokens = 256;
};

struct ThinkOutcome {
  ThoughtPair thought;
  TokenUsage usage;
  std::string raw_sub_query;
  std::string raw_sub_answer;
};

struct FinalAnswer {
  std::string text;
  TokenUsage usage;
};

/// Strips surrounding whitespace, quotes and a leading "Sub-query:" style
/// label from a generated sub-query.
std::string clean_sub_query(std::string_view raw);

/// Two sequential calls: generate one sub-query from (Q, M_i), then answer
/// it from (Q, M_i, Q_sub) without any retrieval. Throws EmptyOutputError
/// if either part comes back blank.
ThinkOutcome think(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                   const PromptSet& prompts, const GenerationParams& params = {},
                   const RenderConfig& render = {});

/// Final synthesis from M_N and Q; returns the trimmed completion.
FinalAnswer answer(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                   const PromptSet& prompts, const GenerationParams& params = {},
                   const RenderConfig& render = {});

struct RewrittenQuery {
  std::string query;
  TokenUsage usage;
};

/// Optional model-written search query (query_mode = llm-rewrite). Falls back
/// to formulate_query() when the model returns blank text.
RewrittenQuery rewrite_query(LlmBackend& backend, const WorkingMemory& memory,
                             std::string_view question, const PromptSet& prompts,
                             const GenerationParams& params = {}, const RenderConfig& render = {});

}  // namespace ace
