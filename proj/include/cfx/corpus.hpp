#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfx/document.hpp"
#include "cfx/generation.hpp"

namespace cfx {

struct CorpusConfig {
  std::uint64_t seed = 1;
  /// Documents across train and test (4:1). The OOD split matches test size.
  std::size_t size = 500;
  std::size_t lexicon_pairs = 24;  // at most builtin_sentiment_pairs().size()
  std::size_t filler_words = 16;
  std::optional<std::string> spurious_token;
  /// Share of positive train/test documents carrying the spurious token.
  double spurious_rate = 0.97;
};

struct SyntheticCorpus {
  std::vector<Document> train;
  std::vector<Document> test;
  std::vector<Document> ood;
  std::vector<LexiconEntry> lexicon;  // labelled antonym pairs in use
  /// Phi coefficient between spurious-token presence and the positive label.
  std::optional<double> train_spurious_correlation;
  std::optional<double> ood_spurious_correlation;
};

inline constexpr const char* kPositive = "positive";
inline constexpr const char* kNegative = "negative";

/// (positive word, negative antonym) pairs available to the generator.
const std::vector<std::pair<std::string, std::string>>& builtin_sentiment_pairs();

/// Template sentences carrying 3 or 5 distinct sentiment words (never a word
/// together with its antonym) plus filler. The label is the majority
/// polarity. With a spurious token, train and test place it in
/// `spurious_rate` of positive documents and no negative ones; OOD places it
/// in half of each class.
SyntheticCorpus make_synthetic_corpus(const CorpusConfig& config);

/// Majority polarity recomputed from lexicon word presence.
std::optional<std::string> lexicon_majority(const std::string& text, const std::vector<LexiconEntry>& lexicon);

/// Phi coefficient between token presence and label == positive_label.
double token_label_correlation(const std::vector<Document>& docs, const std::string& token,
                               const std::string& positive_label);

}  // namespace cfx
