// SPDX-License-Identifier: Apache-2.0
#include <ace/backend.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <array>

namespace ace {
namespace {

constexpr std::array<std::string_view, 5> kTagNames = {
    "Decide", "SubQuery", "SubAnswer", "FinalAnswer", "QueryRewrite"};

}  // namespace

std::string_view to_string(CallTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

std::optional<CallTag> parse_call_tag(std::string_view name) {
  const auto folded = text::casefold(name);
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (folded == text::casefold(kTagNames[i])) return static_cast<CallTag>(i);
  }
  return std::nullopt;
}

void validate(const CompletionRequest& request) {
  if (text::trim(request.prompt).empty()) throw InvalidArgument("completion prompt is empty");
  if (request.temperature < 0.0) throw InvalidArgument("temperature must be non-negative");
  if (request.max_tokens <= 0) throw InvalidArgument("max_tokens must be positive");
}

std::size_t count_tokens(std::string_view text) {
  return text::split_whitespace(text).size();
}

}  // namespace ace
