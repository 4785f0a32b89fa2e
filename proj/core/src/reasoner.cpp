// SPDX-License-Identifier: Apache-2.0
#include <ace/reasoner.hpp>

#include <ace/errors.hpp>
#include <ace/retriever.hpp>
#include <ace/text.hpp>

#include <array>

namespace ace {
namespace {

CompletionRequest make_request(std::string prompt, CallTag tag, const GenerationParams& params) {
  CompletionRequest request;
  request.prompt = std::move(prompt);
  request.temperature = params.temperature;
  request.seed = params.seed;
  request.max_tokens = params.max_tokens;
  request.tag = tag;
  return request;
}

void require_query(const WorkingMemory& memory) {
  if (memory.question().empty()) throw InvalidArgument("memory holds no query item");
}

std::string strip_quotes(std::string s) {
  while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                           (s.front() == '\'' && s.back() == '\''))) {
    s = text::trim(std::string_view(s).substr(1, s.size() - 2));
  }
  return s;
}

}  // namespace

std::string clean_sub_query(std::string_view raw) {
  static constexpr std::array<std::string_view, 4> kLabels = {"sub-query:", "subquery:",
                                                              "sub query:", "query:"};
  auto s = text::trim(raw);
  const auto folded = text::casefold(s);
  for (auto label : kLabels) {
    if (folded.rfind(label, 0) == 0) {
      s = text::trim(std::string_view(s).substr(label.size()));
      break;
    }
  }
  return strip_quotes(std::move(s));
}

ThinkOutcome think(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                   const PromptSet& prompts, const GenerationParams& params,
                   const RenderConfig& render) {
  require_query(memory);
  const auto rendered = render_memory(memory, render);

  ThinkOutcome outcome;
  auto first = backend.complete(make_request(
      fill_template(prompts.sub_query, {{"Q", question}, {"M_i", rendered}}), CallTag::SubQuery,
      params));
  outcome.raw_sub_query = std::move(first.text);
  outcome.usage += first.usage;
  outcome.thought.sub_query = clean_sub_query(outcome.raw_sub_query);
  if (outcome.thought.sub_query.empty()) throw EmptyOutputError("model produced an empty sub-query");

  auto second = backend.complete(make_request(
      fill_template(prompts.sub_answer,
                    {{"Q", question}, {"M_i", rendered}, {"Q_sub", outcome.thought.sub_query}}),
      CallTag::SubAnswer, params));
  outcome.raw_sub_answer = std::move(second.text);
  outcome.usage += second.usage;
  outcome.thought.sub_answer = text::trim(outcome.raw_sub_answer);
  if (outcome.thought.sub_answer.empty()) {
    throw EmptyOutputError("model produced an empty sub-answer");
  }
  return outcome;
}

FinalAnswer answer(LlmBackend& backend, const WorkingMemory& memory, std::string_view question,
                   const PromptSet& prompts, const GenerationParams& params,
                   const RenderConfig& render) {
  const auto rendered = render_memory(memory, render);
  auto completion = backend.complete(make_request(
      fill_template(prompts.final_answer, {{"Q", question}, {"M_i", rendered}}),
      CallTag::FinalAnswer, params));
  FinalAnswer out{text::trim(completion.text), completion.usage};
  if (out.text.empty()) throw EmptyOutputError("model produced an empty final answer");
  return out;
}

RewrittenQuery rewrite_query(LlmBackend& backend, const WorkingMemory& memory,
                             std::string_view question, const PromptSet& prompts,
                             const GenerationParams& params, const RenderConfig& render) {
  require_query(memory);
  auto completion = backend.complete(make_request(
      fill_template(prompts.query_rewrite,
                    {{"Q", question}, {"M_i", render_memory(memory, render)}}),
      CallTag::QueryRewrite, params));
  RewrittenQuery out{clean_sub_query(completion.text), completion.usage};
  if (text::lexical_terms(out.query).empty()) out.query = formulate_query(memory, question);
  return out;
}

}  // namespace ace
