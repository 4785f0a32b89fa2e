// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace ace {

/// The binary decision space of a round.
enum class Action { Retrieve, Think };

std::string_view to_string(Action action);

/// Accepts "RETRIEVE"/"R"/"THINK"/"T"/"REASON" in any case.
std::optional<Action> parse_action(std::string_view label);

struct Passage {
  std::string doc_id;
  std::string title;
  std::string text;
  double score = 0.0;
};

struct ThoughtPair {
  std::string sub_query;
  std::string sub_answer;
};

enum class ItemKind : std::uint8_t { Query, Passage, Thought };

using ContentKey = std::uint64_t;

/// One element of the working memory. The content key depends only on the
/// item kind and its normalized text, never on the round or retrieval score.
class MemoryItem {
public:
  static MemoryItem query(std::string_view question, int round = 0);
  static MemoryItem passage(Passage passage, int round);
  static MemoryItem thought(ThoughtPair thought, int round);

  ItemKind kind() const noexcept { return kind_; }
  int inserted_round() const noexcept { return inserted_round_; }
  ContentKey content_key() const noexcept { return key_; }

  // Accessors throw std::bad_variant_access on kind mismatch.
  const std::string& query_text() const { return std::get<std::string>(payload_); }
  const Passage& passage() const { return std::get<Passage>(payload_); }
  const ThoughtPair& thought() const { return std::get<ThoughtPair>(payload_); }

  /// Short description used in traces ("passage:doc_7", "thought:<sub_query>").
  std::string summary() const;

private:
  MemoryItem(ItemKind kind, std::variant<std::string, Passage, ThoughtPair> payload, int round);

  ItemKind kind_;
  std::variant<std::string, Passage, ThoughtPair> payload_;
  int inserted_round_;
  ContentKey key_;
};

ContentKey content_key(const Passage& passage);
ContentKey content_key(const ThoughtPair& thought);
ContentKey query_content_key(std::string_view question);

struct InsertResult;

/// Ordered, duplicate-free collection of memory items. Values are immutable;
/// growth happens through union_insert, which returns a new memory.
class WorkingMemory {
public:
  WorkingMemory() = default;

  std::span<const MemoryItem> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool contains(ContentKey key) const { return keys_.contains(key); }

  /// Text of the leading Query item, or empty if there is none.
  std::string_view question() const;

  std::size_t count(ItemKind kind) const;

  /// Most recently inserted thought, if any.
  const ThoughtPair* latest_thought() const;

  friend bool operator==(const WorkingMemory& a, const WorkingMemory& b);

private:
  friend WorkingMemory init_memory(std::string_view question);
  friend InsertResult union_insert(const WorkingMemory& memory,
                                   std::span<const MemoryItem> new_items);

  std::vector<MemoryItem> items_;
  std::unordered_set<ContentKey> keys_;
};

struct InsertResult {
  WorkingMemory memory;
  std::size_t inserted = 0;
};

/// M_0 = {Q}. Throws InvalidArgument if the trimmed question is empty.
WorkingMemory init_memory(std::string_view question);

/// Set union preserving order: prior items first, then each new item whose
/// key was absent (earlier duplicates within `new_items` win).
InsertResult union_insert(const WorkingMemory& memory, std::span<const MemoryItem> new_items);

struct RenderConfig {
  std::string question_label = "Question:";
  std::string context_label = "Context:";
  std::string thoughts_label = "Sub-queries answered:";
};

/// Deterministic prompt text: question, then passages, then thought pairs,
/// each group in insertion order. Throws InvalidArgument on an empty memory.
std::string render_memory(const WorkingMemory& memory, const RenderConfig& config = {});

/// The state tuple threaded through the rounds of one episode.
struct AceState {
  WorkingMemory memory;
  std::string question;
  int round = 0;
  int budget = 0;
  int committee_size = 0;
  std::vector<Action> actions_taken;
};

AceState initial_state(std::string_view question, int budget, int committee_size);

}  // namespace ace
