// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the memory, retriever, backend and scoring code.
// Case folding is ASCII-only; bytes >= 0x80 pass through untouched.
namespace ace::text {

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string casefold(std::string_view s);

/// trim + collapse internal whitespace + casefold.
std::string normalize(std::string_view s);

/// Whitespace-separated tokens, views into `s`.
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Lowercased alphanumeric terms; every other ASCII byte is a separator.
std::vector<std::string> lexical_terms(std::string_view s);

/// True if `word` occurs in `s` as a whole word, ignoring ASCII case.
bool contains_word_icase(std::string_view s, std::string_view word);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

std::string to_hex(std::uint64_t value);

}  // namespace ace::text
