// SPDX-License-Identifier: Apache-2.0
#include <ace/memory.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <algorithm>

namespace ace {
namespace {

// Separates the fields of a two-part payload inside its key.
constexpr char kUnitSeparator = '\x1f';

ContentKey key_of(ItemKind kind, std::string_view normalized) {
  const char tag = static_cast<char>('0' + static_cast<int>(kind));
  return text::fnv1a64(normalized, text::fnv1a64(std::string_view(&tag, 1)));
}

}  // namespace

std::string_view to_string(Action action) {
  return action == Action::Retrieve ? "RETRIEVE" : "THINK";
}

std::optional<Action> parse_action(std::string_view label) {
  const auto folded = text::casefold(text::trim(label));
  if (folded == "retrieve" || folded == "r") return Action::Retrieve;
  if (folded == "think" || folded == "t" || folded == "reason") return Action::Think;
  return std::nullopt;
}

ContentKey query_content_key(std::string_view question) {
  return key_of(ItemKind::Query, text::normalize(question));
}

ContentKey content_key(const Passage& passage) {
  std::string joined = text::normalize(passage.title);
  joined.push_back(kUnitSeparator);
  joined += text::normalize(passage.text);
  return key_of(ItemKind::Passage, joined);
}

ContentKey content_key(const ThoughtPair& thought) {
  std::string joined = text::normalize(thought.sub_query);
  joined.push_back(kUnitSeparator);
  joined += text::normalize(thought.sub_answer);
  return key_of(ItemKind::Thought, joined);
}

MemoryItem::MemoryItem(ItemKind kind, std::variant<std::string, Passage, ThoughtPair> payload,
                       int round)
    : kind_(kind), payload_(std::move(payload)), inserted_round_(round), key_(0) {
  switch (kind_) {
    case ItemKind::Query: key_ = query_content_key(std::get<std::string>(payload_)); break;
    case ItemKind::Passage: key_ = ace::content_key(std::get<Passage>(payload_)); break;
    case ItemKind::Thought: key_ = ace::content_key(std::get<ThoughtPair>(payload_)); break;
  }
}

MemoryItem MemoryItem::query(std::string_view question, int round) {
  return MemoryItem(ItemKind::Query, std::string(question), round);
}

MemoryItem MemoryItem::passage(Passage passage, int round) {
  return MemoryItem(ItemKind::Passage, std::move(passage), round);
}

MemoryItem MemoryItem::thought(ThoughtPair thought, int round) {
  return MemoryItem(ItemKind::Thought, std::move(thought), round);
}

std::string MemoryItem::summary() const {
  switch (kind_) {
    case ItemKind::Query: return "query:" + query_text();
    case ItemKind::Passage: return "passage:" + passage().doc_id;
    case ItemKind::Thought: return "thought:" + thought().sub_query;
  }
  return {};
}

std::string_view WorkingMemory::question() const {
  if (items_.empty() || items_.front().kind() != ItemKind::Query) return {};
  return items_.front().query_text();
}

std::size_t WorkingMemory::count(ItemKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      items_.begin(), items_.end(), [kind](const MemoryItem& it) { return it.kind() == kind; }));
}

const ThoughtPair* WorkingMemory::latest_thought() const {
  for (auto it = items_.rbegin(); it != items_.rend(); ++it) {
    if (it->kind() == ItemKind::Thought) return &it->thought();
  }
  return nullptr;
}

bool operator==(const WorkingMemory& a, const WorkingMemory& b) {
  return std::equal(a.items_.begin(), a.items_.end(), b.items_.begin(), b.items_.end(),
                    [](const MemoryItem& x, const MemoryItem& y) {
                      return x.content_key() == y.content_key() && x.kind() == y.kind();
                    });
}

WorkingMemory init_memory(std::string_view question) {
  auto trimmed = text::trim(question);
  if (trimmed.empty()) throw InvalidArgument("question is empty");
  WorkingMemory memory;
  memory.items_.push_back(MemoryItem::query(trimmed, 0));
  memory.keys_.insert(memory.items_.back().content_key());
  return memory;
}

InsertResult union_insert(const WorkingMemory& memory, std::span<const MemoryItem> new_items) {
  InsertResult result{memory, 0};
  for (const auto& item : new_items) {
    if (result.memory.keys_.insert(item.content_key()).second) {
      result.memory.items_.push_back(item);
      ++result.inserted;
    }
  }
  return result;
}

std::string render_memory(const WorkingMemory& memory, const RenderConfig& config) {
  if (memory.empty()) throw InvalidArgument("cannot render an empty working memory");

  std::string question_block;
  std::string context_block;
  std::string thought_block;
  int passage_no = 0;
  int thought_no = 0;

  for (const auto& item : memory.items()) {
    switch (item.kind()) {
      case ItemKind::Query:
        question_block += config.question_label + " " + item.query_text() + "\n";
        break;
      case ItemKind::Passage: {
        const auto& p = item.passage();
        context_block += "[" + std::to_string(++passage_no) + "] ";
        if (!p.title.empty()) context_block += p.title + ": ";
        context_block += p.text + "\n";
        break;
      }
      case ItemKind::Thought: {
        const auto& t = item.thought();
        const auto n = std::to_string(++thought_no);
        thought_block += "Q" + n + ": " + t.sub_query + "\n";
        thought_block += "A" + n + ": " + t.sub_answer + "\n";
        break;
      }
    }
  }

  std::string out = question_block;
  if (passage_no > 0) out += config.context_label + "\n" + context_block;
  if (thought_no > 0) out += config.thoughts_label + "\n" + thought_block;
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

AceState initial_state(std::string_view question, int budget, int committee_size) {
  if (budget < 0) throw InvalidArgument("round budget must be non-negative");
  AceState state;
  state.memory = init_memory(question);
  state.question = std::string(state.memory.question());
  state.budget = budget;
  state.committee_size = committee_size;
  return state;
}

}  // namespace ace
