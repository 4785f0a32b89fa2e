// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <initializer_list>

namespace ace {

/// Prompt templates. Placeholders: {Q} question, {M_i} rendered working
/// memory, {Q_sub} the sub-query being answered.
struct PromptSet {
  std::string decide;
  std::string sub_query;
  std::string sub_answer;
  std::string final_answer;
  std::string query_rewrite;

  static PromptSet defaults();
};

/// Single-pass placeholder substitution: text inserted for one placeholder
/// is never rescanned, so memory content containing "{Q}" stays literal.
std::string fill_template(std::string_view tmpl,
                          std::initializer_list<std::pair<std::string_view, std::string_view>> values);

}  // namespace ace
