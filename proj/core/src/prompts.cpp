// SPDX-License-Identifier: Apache-2.0
#include <ace/prompts.hpp>

namespace ace {

PromptSet PromptSet::defaults() {
  PromptSet p;
  p.decide =
      "You are an expert question-answering system. Based on the original question {Q}, the "
      "current context, and the sub-queries {M_i}, decide whether to: (1) THINK: continue asking "
      "one sub-query which is needed to answer the question; (2) RETRIEVE: retrieve more external "
      "documents from the context to gain more information.\n"
      "Reply with exactly one word: THINK or RETRIEVE.";
  p.sub_query =
      "You are an expert question-answering system. The original question is: {Q}\n\n"
      "{M_i}\n\n"
      "Ask one sub-query which is needed to answer the original question and is not answered "
      "above. Reply with the sub-query only.";
  p.sub_answer =
      "You are an expert question-answering system. The original question is: {Q}\n\n"
      "{M_i}\n\n"
      "Answer the following sub-query using the information above and your own knowledge. "
      "Reply with a short answer only.\n"
      "Sub-query: {Q_sub}";
  p.final_answer =
      "Answer the question using the context and the answered sub-queries. Question: {Q}. "
      "{M_i}. Answer concisely.";
  p.query_rewrite =
      "Write a short search-engine query that would find the missing information needed to "
      "answer the question {Q}.\n\n{M_i}\n\nReply with the query only.";
  return p;
}

std::string fill_template(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      bool replaced = false;
      for (const auto& [name, value] : values) {
        const auto len = name.size();
        if (tmpl.compare(i + 1, len, name) == 0 && i + 1 + len < tmpl.size() &&
            tmpl[i + 1 + len] == '}') {
          out.append(value);
          i += len + 2;
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

}  // namespace ace
