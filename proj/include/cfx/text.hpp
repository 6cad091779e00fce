#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cfx {

/// Word-level token list. A token is a maximal run of word characters
/// (ASCII alphanumerics, '_' and any non-ASCII byte) or a single
/// punctuation character. Case is preserved.
using TokenSequence = std::vector<std::string>;

/// A token together with its byte span in the source string.
struct TokenSpan {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

TokenSequence tokenize(std::string_view text);
std::vector<TokenSpan> tokenize_with_spans(std::string_view text);

/// Joins tokens with single spaces.
std::string join_tokens(const TokenSequence& tokens);

bool is_word_token(std::string_view token);
std::string to_lower(std::string_view s);

/// Minimal number of token insertions, deletions and substitutions turning
/// `a` into `b`. Two-row dynamic program, O(|a|*|b|) time.
std::size_t token_levenshtein(const TokenSequence& a, const TokenSequence& b);

/// Fraction of `watch` words that no longer occur (case-folded) in
/// `generated`. Every watch word must occur case-folded in `original`;
/// std::invalid_argument otherwise. An empty watch set yields 0.
double changed_words(const TokenSequence& original, const TokenSequence& generated,
                     const std::vector<std::string>& watch);

}  // namespace cfx
