// SPDX-License-Identifier: Apache-2.0
#include <ace/retriever.hpp>

#include <ace/errors.hpp>
#include <ace/text.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>

namespace ace {
namespace {

using json = nlohmann::json;

}  // namespace

Corpus Corpus::from_documents(std::vector<Document> docs) {
  Corpus corpus;
  corpus.by_id_.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!corpus.by_id_.emplace(docs[i].doc_id, i).second) throw DuplicateIdError(docs[i].doc_id);
  }
  corpus.docs_ = std::move(docs);
  return corpus;
}

std::optional<std::size_t> Corpus::find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

Corpus ingest_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw MalformedRecordError(line_no, e.what());
    }
    if (!record.is_object()) throw MalformedRecordError(line_no, "record is not an object");

    Document doc;
    if (!record.contains("doc_id") || !record["doc_id"].is_string() ||
        record["doc_id"].get<std::string>().empty()) {
      throw MalformedRecordError(line_no, "missing string field 'doc_id'");
    }
    doc.doc_id = record["doc_id"].get<std::string>();
    if (!record.contains("text") || !record["text"].is_string()) {
      throw MalformedRecordError(line_no, "missing string field 'text'");
    }
    doc.text = record["text"].get<std::string>();
    if (record.contains("title") && !record["title"].is_null()) {
      if (!record["title"].is_string()) {
        throw MalformedRecordError(line_no, "field 'title' must be a string");
      }
      doc.title = record["title"].get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  return Corpus::from_documents(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus '" + path.string() + "'");
  return ingest_corpus(in);
}

std::string indexed_text(const Document& doc) {
  if (doc.title.empty()) return doc.text;
  return doc.title + " " + doc.text;
}

std::span<const Posting> Bm25Index::postings(std::string_view term) const {
  auto it = postings_.find(std::string(term));
  if (it == postings_.end()) return {};
  return it->second;
}

double Bm25Index::idf(std::size_t df) const {
  const auto n = static_cast<double>(doc_count());
  const auto d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<double> Bm25Index::score_all(std::span<const std::string> query_terms) const {
  std::vector<double> scores(doc_count(), 0.0);
  const double k1 = params_.k1;
  const double b = params_.b;
  for (const auto& term : query_terms) {
    const auto list = postings(term);
    if (list.empty()) continue;
    const double weight = idf(list.size());
    for (const auto& p : list) {
      const double tf = p.tf;
      const double len = doc_lengths_[p.ordinal];
      const double norm = k1 * (1.0 - b + b * len / avg_doc_length_);
      scores[p.ordinal] += weight * tf * (k1 + 1.0) / (tf + norm);
    }
  }
  return scores;
}

bool operator==(const Bm25Index& a, const Bm25Index& b) {
  return a.postings_ == b.postings_ && a.doc_lengths_ == b.doc_lengths_ &&
         a.avg_doc_length_ == b.avg_doc_length_ && a.params_.k1 == b.params_.k1 &&
         a.params_.b == b.params_.b;
}

Bm25Index build_index(const Corpus& corpus, Bm25Params params) {
  if (corpus.empty()) throw InvalidArgument("cannot index an empty corpus");
  if (!(params.k1 > 0.0)) throw InvalidArgument("BM25 k1 must be positive");
  if (!(params.b >= 0.0 && params.b <= 1.0)) throw InvalidArgument("BM25 b must be in [0, 1]");

  Bm25Index index;
  index.params_ = params;
  index.doc_lengths_.reserve(corpus.size());

  std::unordered_map<std::string, std::uint32_t> tf;
  for (std::size_t ordinal = 0; ordinal < corpus.size(); ++ordinal) {
    const auto terms = text::lexical_terms(indexed_text(corpus[ordinal]));
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    tf.clear();
    for (const auto& t : terms) ++tf[t];
    for (auto& [term, count] : tf) {
      index.postings_[term].push_back(Posting{static_cast<std::uint32_t>(ordinal), count});
    }
  }
  const double total = std::accumulate(index.doc_lengths_.begin(), index.doc_lengths_.end(), 0.0);
  index.avg_doc_length_ = total / static_cast<double>(index.doc_lengths_.size());
  return index;
}

std::vector<Passage> retrieve(const Bm25Index& index, const Corpus& corpus,
                              const RetrievalRequest& request) {
  if (request.top_k == 0) throw InvalidArgument("top_k must be >= 1");
  if (index.doc_count() != corpus.size()) {
    throw InvalidArgument("index was not built over this corpus");
  }
  const auto terms = text::lexical_terms(request.query);
  if (terms.empty()) throw InvalidArgument("query has no searchable terms");

  const auto scores = index.score_all(terms);
  std::vector<std::uint32_t> hits;
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0.0) hits.push_back(i);
  }
  const auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const auto keep = std::min(request.top_k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    better);
  hits.resize(keep);

  std::vector<Passage> out;
  out.reserve(keep);
  for (auto ordinal : hits) {
    const auto& doc = corpus[ordinal];
    out.push_back(Passage{doc.doc_id, doc.title, doc.text, scores[ordinal]});
  }
  return out;
}

std::string formulate_query(const WorkingMemory& memory, std::string_view question) {
  std::string query(question);
  if (const auto* latest = memory.latest_thought()) {
    query += " ";
    query += latest->sub_query;
  }
  return query;
}

Retriever::Retriever(Corpus corpus, Bm25Index index)
    : corpus_(std::move(corpus)), index_(std::move(index)) {
  if (index_.doc_count() != corpus_.size()) {
    throw InvalidArgument("index was not built over this corpus");
  }
}

Retriever::Retriever(Corpus corpus, Bm25Params params)
    : corpus_(std::move(corpus)), index_(build_index(corpus_, params)) {}

Retriever::Retriever(Retriever&& other) noexcept
    : corpus_(std::move(other.corpus_)),
      index_(std::move(other.index_)),
      lookups_(other.lookups_.load()) {}

std::vector<Passage> Retriever::search(const RetrievalRequest& request) const {
  ++lookups_;
  return retrieve(index_, corpus_, request);
}

}  // namespace ace
