// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code paths it checks.
#pragma once

#include <ace/retriever.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace ace::testing {

struct OracleHit {
  std::size_t ordinal;
  double score;
};

/// Lowercased runs of ASCII letters/digits. Test corpora are ASCII-only.
inline std::vector<std::string> oracle_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// Brute-force Okapi BM25 with IDF(t) = ln(1 + (Nd - df + 0.5) / (df + 0.5)),
/// summed over every query token occurrence. Returns positive-score docs by
/// descending score, ascending ordinal on ties.
inline std::vector<OracleHit> bm25_oracle(const std::vector<std::string>& doc_texts,
                                          const std::string& query, double k1 = 1.2,
                                          double b = 0.75) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : doc_texts) docs.push_back(oracle_tokens(t));
  const double nd = static_cast<double>(docs.size());
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  const double avg = total_len / nd;

  const auto q = oracle_tokens(query);
  std::vector<OracleHit> hits;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0;
    for (const auto& term : q) {
      const double tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), term));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), term) != d.end() ? 1 : 0;
      const double idf = std::log(1.0 + (nd - df + 0.5) / (df + 0.5));
      const double len = static_cast<double>(docs[i].size());
      score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg));
    }
    if (score > 0) hits.push_back({i, score});
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const OracleHit& a, const OracleHit& b) { return a.score > b.score; });
  return hits;
}

/// Counts both labels; strictly larger count wins, ties go to `tie`.
/// Ballot bit j set means agent j voted THINK.
inline bool majority_is_think_oracle(std::uint32_t ballot_bits, int k, bool tie_is_think = false) {
  int think = 0;
  for (int j = 0; j < k; ++j) think += (ballot_bits >> j) & 1u;
  const int retrieve = k - think;
  if (think == retrieve) return tie_is_think;
  return think > retrieve;
}

/// Random ASCII corpus over a small vocabulary so that terms repeat.
struct RandomCorpus {
  std::vector<Document> docs;
  std::vector<std::string> texts;  // what the index sees (title empty)
};

inline RandomCorpus random_corpus(std::mt19937_64& rng, std::size_t max_docs,
                                  std::size_t vocab = 40) {
  std::uniform_int_distribution<std::size_t> n_docs(1, max_docs);
  std::uniform_int_distribution<std::size_t> n_words(0, 30);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  std::bernoulli_distribution upper(0.2);
  RandomCorpus out;
  const auto n = n_docs(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const auto len = n_words(rng);
    for (std::size_t w = 0; w < len; ++w) {
      if (!text.empty()) text += (w % 7 == 0) ? ", " : " ";
      std::string token = "w" + std::to_string(word(rng));
      if (upper(rng)) token[0] = 'W';
      text += token;
    }
    out.docs.push_back(Document{"doc" + std::to_string(i), "", text});
    out.texts.push_back(text);
  }
  return out;
}

inline std::string random_query(std::mt19937_64& rng, std::size_t max_terms,
                                std::size_t vocab = 40) {
  std::uniform_int_distribution<std::size_t> n_terms(1, max_terms);
  std::uniform_int_distribution<std::size_t> word(0, vocab + 9);  // some unseen terms
  std::string q;
  const auto n = n_terms(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (!q.empty()) q += " ";
    q += "w" + std::to_string(word(rng));
  }
  return q;
}

}  // namespace ace::testing
