// SPDX-License-Identifier: Apache-2.0
//
// Binary layout (all integers little-endian):
//
//   magic "ACEIDX\0\0" | u32 version
//   u64 doc_count, then per doc: str doc_id, str title, str text
//   f64 k1 | f64 b | u64 n, u32 doc_lengths[n]
//   u64 term_count, then per term (sorted): str term, u64 m, (u32 ordinal, u32 tf)[m]
//
// where str = u64 byte length followed by the bytes.
#include <ace/errors.hpp>
#include <ace/retriever.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace ace {
namespace {

constexpr std::array<char, 8> kMagic = {'A', 'C', 'E', 'I', 'D', 'X', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 34;

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError("index file is truncated");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void put_str(std::ostream& out, std::string_view s) {
  put_le<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  if (n > kMaxLength) throw FormatError("index file has an implausible string length");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw FormatError("index file is truncated");
  }
  return s;
}

std::uint64_t get_count(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  if (n > kMaxLength) throw FormatError("index file has an implausible element count");
  return n;
}

}  // namespace

void Bm25Index::save(std::ostream& out) const {
  put_f64(out, params_.k1);
  put_f64(out, params_.b);
  put_le<std::uint64_t>(out, doc_lengths_.size());
  for (auto len : doc_lengths_) put_le(out, len);

  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, list] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });

  put_le<std::uint64_t>(out, terms.size());
  for (const auto* term : terms) {
    const auto& list = postings_.at(*term);
    put_str(out, *term);
    put_le<std::uint64_t>(out, list.size());
    for (const auto& p : list) {
      put_le(out, p.ordinal);
      put_le(out, p.tf);
    }
  }
}

Bm25Index Bm25Index::load(std::istream& in) {
  Bm25Index index;
  index.params_.k1 = get_f64(in);
  index.params_.b = get_f64(in);
  if (!(index.params_.k1 > 0.0) || !(index.params_.b >= 0.0 && index.params_.b <= 1.0)) {
    throw FormatError("index file has invalid BM25 parameters");
  }
  const auto n_docs = get_count(in);
  index.doc_lengths_.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) index.doc_lengths_.push_back(get_le<std::uint32_t>(in));
  if (n_docs == 0) throw FormatError("index file holds no documents");
  const double total = std::accumulate(index.doc_lengths_.begin(), index.doc_lengths_.end(), 0.0);
  index.avg_doc_length_ = total / static_cast<double>(n_docs);

  const auto n_terms = get_count(in);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    auto term = get_str(in);
    const auto m = get_count(in);
    std::vector<Posting> list;
    list.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      Posting p{get_le<std::uint32_t>(in), get_le<std::uint32_t>(in)};
      if (p.ordinal >= n_docs || p.tf == 0) throw FormatError("index file has a bad posting");
      list.push_back(p);
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  return index;
}

void save_index_bundle(const std::filesystem::path& path, const Corpus& corpus,
                       const Bm25Index& index) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write index '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le(out, kVersion);
  put_le<std::uint64_t>(out, corpus.size());
  for (const auto& doc : corpus.docs()) {
    put_str(out, doc.doc_id);
    put_str(out, doc.title);
    put_str(out, doc.text);
  }
  index.save(out);
  if (!out.flush()) throw Error("failed writing index '" + path.string() + "'");
}

Retriever load_index_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index '" + path.string() + "'");

  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("'" + path.string() + "' is not an ace index file");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("unsupported index version " + std::to_string(version));
  }

  const auto n_docs = get_count(in);
  std::vector<Document> docs;
  docs.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    Document doc;
    doc.doc_id = get_str(in);
    doc.title = get_str(in);
    doc.text = get_str(in);
    docs.push_back(std::move(doc));
  }
  auto corpus = Corpus::from_documents(std::move(docs));
  auto index = Bm25Index::load(in);
  if (index.doc_count() != corpus.size()) {
    throw FormatError("index and corpus sections disagree on document count");
  }
  return Retriever(std::move(corpus), std::move(index));
}

}  // namespace ace
