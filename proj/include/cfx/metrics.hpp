#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfx/document.hpp"
#include "cfx/generation.hpp"
#include "cfx/selection.hpp"
#include "cfx/text.hpp"

namespace cfx {

double flip_rate(const std::vector<CounterfactualRecord>& records);
double mean_distance(const std::vector<CounterfactualRecord>& records);
/// Mean of changed_words over records; std::invalid_argument when a record
/// carries no important words.
double modification_rate(const std::vector<CounterfactualRecord>& records);

/// Next-token model used for perplexity.
class LanguageScorer {
 public:
  virtual ~LanguageScorer() = default;
  /// log p(z_i | z_<i) for every token of the sequence.
  virtual std::vector<double> token_log_probs(const TokenSequence& tokens) const = 0;
};

/// Assigns 1/V to every token.
class UniformScorer final : public LanguageScorer {
 public:
  explicit UniformScorer(std::size_t vocabulary_size);
  std::vector<double> token_log_probs(const TokenSequence& tokens) const override;

 private:
  double log_p_;
};

/// Add-k smoothed n-gram model over lowercased tokens. Outcomes are the
/// training vocabulary plus "<unk>"; contexts are left-padded with "<s>".
class NGramScorer final : public LanguageScorer {
 public:
  static constexpr const char* kUnknown = "<unk>";
  static constexpr const char* kStart = "<s>";

  NGramScorer(const std::vector<Document>& corpus, std::size_t order = 3, double k = 0.1);

  std::vector<double> token_log_probs(const TokenSequence& tokens) const override;

  /// p(word | context) with context holding exactly order-1 symbols
  /// (already lowercased / mapped, "<s>" allowed).
  double probability(const std::vector<std::string>& context, const std::string& word) const;
  std::size_t count(const std::vector<std::string>& context, const std::string& word) const;
  std::size_t context_count(const std::vector<std::string>& context) const;

  std::size_t order() const { return order_; }
  double smoothing() const { return k_; }
  /// Outcome symbols, including "<unk>", sorted.
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  std::string map_token(const std::string& token) const;  // lowercase or <unk>

 private:
  static std::string context_key(const std::vector<std::string>& context);

  std::size_t order_;
  double k_;
  std::vector<std::string> outcomes_;
  std::map<std::string, std::map<std::string, std::size_t>> counts_;
  std::map<std::string, std::size_t> context_totals_;
};

NGramScorer fit_ngram(const std::vector<Document>& corpus, std::size_t order = 3, double k = 0.1);

/// exp(-(1/n) sum log p(z_i | z_<i)); std::invalid_argument on empty text.
double perplexity(const LanguageScorer& scorer, const std::string& text);

struct QualityScores {
  int grammar = 0;
  int cohesiveness = 0;
  int fluency = 0;
};

class JudgeError : public std::runtime_error {
 public:
  enum class Kind { kTransport, kParse, kOutOfRange };
  JudgeError(Kind kind, const std::string& what, std::string raw)
      : std::runtime_error(what), kind_(kind), raw_(std::move(raw)) {}
  Kind kind() const { return kind_; }
  const std::string& raw_reply() const { return raw_; }

 private:
  Kind kind_;
  std::string raw_;
};

std::string judge_prompt(const std::string& text);
/// Parses "grammar=<1-5> cohesiveness=<1-5> fluency=<1-5>".
QualityScores parse_judge_reply(const std::string& reply);
QualityScores judge_quality(const Generator& judge, const std::string& text);

struct ReportRow {
  CounterfactualRecord record;
  std::optional<double> perplexity;
  std::optional<double> modification_rate;
  std::optional<QualityScores> quality;
};

struct DocumentFailure {
  std::string id;
  std::string error;
};

struct QualityMeans {
  double grammar = 0.0;
  double cohesiveness = 0.0;
  double fluency = 0.0;
};

struct EvaluationReport {
  std::size_t n = 0;
  double flip_rate = 0.0;
  double mean_distance = 0.0;
  std::optional<double> mean_perplexity;
  std::optional<double> mean_modification_rate;
  std::optional<QualityMeans> quality;
  std::vector<ReportRow> rows;
  std::vector<DocumentFailure> failures;
};

/// Aggregates over successful records. Perplexity is computed on the
/// counterfactual text when a scorer is given; MR when every record
/// carries important words; quality when every row has judge scores.
EvaluationReport build_report(std::vector<ReportRow> rows, const LanguageScorer* scorer,
                              std::vector<DocumentFailure> failures = {});

}  // namespace cfx
