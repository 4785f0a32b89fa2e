// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ace/memory.hpp>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ace {

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
};

class Corpus {
public:
  Corpus() = default;

  /// Throws DuplicateIdError if two documents share a doc_id.
  static Corpus from_documents(std::vector<Document> docs);

  std::span<const Document> docs() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Document& operator[](std::size_t ordinal) const { return docs_.at(ordinal); }
  std::optional<std::size_t> find(std::string_view doc_id) const;

private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// One JSON object per line with string fields doc_id, text and optional
/// title. Blank lines are skipped. Throws MalformedRecordError (with line
/// number) or DuplicateIdError.
Corpus ingest_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::uint32_t ordinal;
  std::uint32_t tf;

  friend bool operator==(const Posting&, const Posting&) = default;
};

/// Okapi BM25 inverted index over lexical_terms() of "title text".
class Bm25Index {
public:
  std::span<const Posting> postings(std::string_view term) const;
  std::span<const std::uint32_t> doc_lengths() const noexcept { return doc_lengths_; }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  const Bm25Params& params() const noexcept { return params_; }
  std::size_t doc_count() const noexcept { return doc_lengths_.size(); }
  std::size_t term_count() const noexcept { return postings_.size(); }

  /// IDF(t) = ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
  double idf(std::size_t df) const;

  /// Scores every document; index = doc ordinal.
  std::vector<double> score_all(std::span<const std::string> query_terms) const;

  void save(std::ostream& out) const;
  static Bm25Index load(std::istream& in);

  friend bool operator==(const Bm25Index& a, const Bm25Index& b);

private:
  friend Bm25Index build_index(const Corpus& corpus, Bm25Params params);

  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  Bm25Params params_;
};

/// Throws InvalidArgument on an empty corpus or k1 <= 0 or b outside [0, 1].
Bm25Index build_index(const Corpus& corpus, Bm25Params params = {});

/// The text that is indexed for a document.
std::string indexed_text(const Document& doc);

struct RetrievalRequest {
  std::string query;
  std::size_t top_k = 5;
};

/// Top-k documents by descending BM25 score, ties by ascending ordinal;
/// zero-score documents are excluded. Throws InvalidArgument if the query
/// has no terms or top_k is 0.
std::vector<Passage> retrieve(const Bm25Index& index, const Corpus& corpus,
                              const RetrievalRequest& request);

/// question, or question + " " + the latest thought's sub-query.
std::string formulate_query(const WorkingMemory& memory, std::string_view question);

/// Owns a corpus and its index and counts lookups. search() may be called
/// concurrently.
class Retriever {
public:
  Retriever(Corpus corpus, Bm25Index index);
  explicit Retriever(Corpus corpus, Bm25Params params = {});
  Retriever(Retriever&& other) noexcept;

  std::vector<Passage> search(const RetrievalRequest& request) const;

  std::size_t lookups() const noexcept { return lookups_.load(); }
  const Corpus& corpus() const noexcept { return corpus_; }
  const Bm25Index& index() const noexcept { return index_; }

private:
  Corpus corpus_;
  Bm25Index index_;
  mutable std::atomic<std::size_t> lookups_{0};
};

/// Versioned binary bundle holding the corpus and its index, so a search
/// session can start without re-tokenizing.
void save_index_bundle(const std::filesystem::path& path, const Corpus& corpus,
                       const Bm25Index& index);
Retriever load_index_bundle(const std::filesystem::path& path);

}  // namespace ace
