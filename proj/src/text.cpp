#include "cfx/text.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace cfx {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_word_char(unsigned char c) {
  return c >= 0x80 || std::isalnum(c) != 0 || c == '_';
}

}  // namespace

std::vector<TokenSpan> tokenize_with_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word_char(c)) {
      while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
    }
    out.push_back({std::string(text.substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  for (auto& span : tokenize_with_spans(text)) out.push_back(std::move(span.text));
  return out;
}

std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_word_token(std::string_view token) {
  return !token.empty() && is_word_char(static_cast<unsigned char>(token.front()));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::size_t token_levenshtein(const TokenSequence& a, const TokenSequence& b) {
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  std::vector<std::size_t> prev(shorter.size() + 1);
  std::vector<std::size_t> cur(shorter.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= shorter.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[shorter.size()];
}

double changed_words(const TokenSequence& original, const TokenSequence& generated,
                     const std::vector<std::string>& watch) {
  if (watch.empty()) return 0.0;
  std::unordered_set<std::string> orig_set;
  std::unordered_set<std::string> gen_set;
  for (const auto& t : original) orig_set.insert(to_lower(t));
  for (const auto& t : generated) gen_set.insert(to_lower(t));

  std::size_t changed = 0;
  for (const auto& w : watch) {
    const auto key = to_lower(w);
    if (!orig_set.contains(key)) {
      throw std::invalid_argument("changed_words: watch word '" + w + "' does not occur in the original text");
    }
    if (!gen_set.contains(key)) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(watch.size());
}

}  // namespace cfx
