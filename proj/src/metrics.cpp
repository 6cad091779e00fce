#include "cfx/metrics.hpp"

#include <cmath>
#include <regex>
#include <set>

namespace cfx {
namespace {

void require_records(const std::vector<CounterfactualRecord>& records, const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string(what) + ": empty record list");
}

}  // namespace

double flip_rate(const std::vector<CounterfactualRecord>& records) {
  require_records(records, "flip_rate");
  std::size_t flipped = 0;
  for (const auto& r : records) flipped += r.flipped ? 1 : 0;
  return static_cast<double>(flipped) / static_cast<double>(records.size());
}

double mean_distance(const std::vector<CounterfactualRecord>& records) {
  require_records(records, "mean_distance");
  double total = 0.0;
  for (const auto& r : records) total += static_cast<double>(r.distance);
  return total / static_cast<double>(records.size());
}

double modification_rate(const std::vector<CounterfactualRecord>& records) {
  require_records(records, "modification_rate");
  double total = 0.0;
  for (const auto& r : records) {
    if (!r.important_words) {
      throw std::invalid_argument("modification_rate: record '" + r.original.id + "' has no important words");
    }
    total += changed_words(tokenize(r.original.text), tokenize(r.counterfactual_text), *r.important_words);
  }
  return total / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------

UniformScorer::UniformScorer(std::size_t vocabulary_size) {
  if (vocabulary_size == 0) throw std::invalid_argument("UniformScorer: empty vocabulary");
  log_p_ = -std::log(static_cast<double>(vocabulary_size));
}

std::vector<double> UniformScorer::token_log_probs(const TokenSequence& tokens) const {
  return std::vector<double>(tokens.size(), log_p_);
}

NGramScorer::NGramScorer(const std::vector<Document>& corpus, std::size_t order, double k) : order_(order), k_(k) {
  if (corpus.empty()) throw std::invalid_argument("fit_ngram: empty corpus");
  if (order < 1) throw std::invalid_argument("fit_ngram: order must be >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("fit_ngram: smoothing constant must be > 0");

  std::vector<TokenSequence> sentences;
  std::set<std::string> vocab;
  for (const auto& d : corpus) {
    TokenSequence s;
    for (const auto& t : tokenize(d.text)) s.push_back(to_lower(t));
    vocab.insert(s.begin(), s.end());
    sentences.push_back(std::move(s));
  }
  vocab.insert(kUnknown);
  outcomes_.assign(vocab.begin(), vocab.end());

  for (const auto& s : sentences) {
    std::vector<std::string> ctx(order_ - 1, kStart);
    for (const auto& w : s) {
      const auto key = context_key(ctx);
      ++counts_[key][w];
      ++context_totals_[key];
      if (!ctx.empty()) {
        ctx.erase(ctx.begin());
        ctx.push_back(w);
      }
    }
  }
}

std::string NGramScorer::context_key(const std::vector<std::string>& context) {
  std::string key;
  for (const auto& c : context) {
    key += c;
    key.push_back('\x1f');
  }
  return key;
}

std::string NGramScorer::map_token(const std::string& token) const {
  auto w = to_lower(token);
  return std::binary_search(outcomes_.begin(), outcomes_.end(), w) ? w : std::string(kUnknown);
}

std::size_t NGramScorer::count(const std::vector<std::string>& context, const std::string& word) const {
  const auto it = counts_.find(context_key(context));
  if (it == counts_.end()) return 0;
  const auto jt = it->second.find(word);
  return jt == it->second.end() ? 0 : jt->second;
}

std::size_t NGramScorer::context_count(const std::vector<std::string>& context) const {
  const auto it = context_totals_.find(context_key(context));
  return it == context_totals_.end() ? 0 : it->second;
}

double NGramScorer::probability(const std::vector<std::string>& context, const std::string& word) const {
  if (context.size() + 1 != order_) throw std::invalid_argument("NGramScorer: context length must be order-1");
  const double num = static_cast<double>(count(context, word)) + k_;
  const double den = static_cast<double>(context_count(context)) + k_ * static_cast<double>(outcomes_.size());
  return num / den;
}

std::vector<double> NGramScorer::token_log_probs(const TokenSequence& tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<std::string> ctx(order_ - 1, kStart);
  for (const auto& t : tokens) {
    const auto w = map_token(t);
    out.push_back(std::log(probability(ctx, w)));
    if (!ctx.empty()) {
      ctx.erase(ctx.begin());
      ctx.push_back(w);
    }
  }
  return out;
}

NGramScorer fit_ngram(const std::vector<Document>& corpus, std::size_t order, double k) {
  return NGramScorer(corpus, order, k);
}

double perplexity(const LanguageScorer& scorer, const std::string& text) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw std::invalid_argument("perplexity: empty token sequence");
  const auto lps = scorer.token_log_probs(tokens);
  double sum = 0.0;
  for (double lp : lps) sum += lp;
  return std::exp(-sum / static_cast<double>(lps.size()));
}

// ---------------------------------------------------------------------------
// Judge

std::string judge_prompt(const std::string& text) {
  return "Rate the following text on a 5-point scale (1 = worst, 5 = best) for three criteria.\n"
         "grammar: the syntactical and grammatical accuracy of the text.\n"
         "cohesiveness: how logical and coherent the text structure is.\n"
         "fluency: whether the text is readable and has a natural flow.\n"
         "Reply with exactly one line in the form: grammar=<1-5> cohesiveness=<1-5> fluency=<1-5>\n"
         "Text: " +
         text + "\n";
}

QualityScores parse_judge_reply(const std::string& reply) {
  static const std::regex grammar_re(R"(grammar\s*[=:]\s*(-?\d{1,6}))", std::regex::icase);
  static const std::regex coh_re(R"(cohesiveness\s*[=:]\s*(-?\d{1,6}))", std::regex::icase);
  static const std::regex flu_re(R"(fluency\s*[=:]\s*(-?\d{1,6}))", std::regex::icase);

  auto extract = [&](const std::regex& re, const char* name) {
    std::smatch m;
    if (!std::regex_search(reply, m, re)) {
      throw JudgeError(JudgeError::Kind::kParse, std::string("judge reply lacks a ") + name + " score", reply);
    }
    const int v = std::stoi(m[1].str());
    if (v < 1 || v > 5) {
      throw JudgeError(JudgeError::Kind::kOutOfRange,
                       std::string(name) + " score " + std::to_string(v) + " outside 1-5", reply);
    }
    return v;
  };
  return {extract(grammar_re, "grammar"), extract(coh_re, "cohesiveness"), extract(flu_re, "fluency")};
}

QualityScores judge_quality(const Generator& judge, const std::string& text) {
  std::string reply;
  try {
    reply = judge.generate(judge_prompt(text), std::nullopt);
  } catch (const std::exception& e) {
    throw JudgeError(JudgeError::Kind::kTransport, e.what(), "");
  }
  return parse_judge_reply(reply);
}

// ---------------------------------------------------------------------------

EvaluationReport build_report(std::vector<ReportRow> rows, const LanguageScorer* scorer,
                              std::vector<DocumentFailure> failures) {
  EvaluationReport report;
  std::vector<CounterfactualRecord> records;
  records.reserve(rows.size());
  for (const auto& r : rows) records.push_back(r.record);

  report.n = records.size();
  report.flip_rate = flip_rate(records);
  report.mean_distance = mean_distance(records);

  bool all_words = true;
  bool all_quality = true;
  double pp_sum = 0.0;
  std::size_t pp_count = 0;
  QualityMeans q;
  for (auto& row : rows) {
    if (scorer && !tokenize(row.record.counterfactual_text).empty()) {
      row.perplexity = perplexity(*scorer, row.record.counterfactual_text);
      pp_sum += *row.perplexity;
      ++pp_count;
    }
    if (row.record.important_words) {
      row.modification_rate = changed_words(tokenize(row.record.original.text),
                                            tokenize(row.record.counterfactual_text), *row.record.important_words);
    } else {
      all_words = false;
    }
    if (row.quality) {
      q.grammar += row.quality->grammar;
      q.cohesiveness += row.quality->cohesiveness;
      q.fluency += row.quality->fluency;
    } else {
      all_quality = false;
    }
  }
  if (pp_count > 0) report.mean_perplexity = pp_sum / static_cast<double>(pp_count);
  if (all_words) report.mean_modification_rate = modification_rate(records);
  if (all_quality) {
    const auto n = static_cast<double>(rows.size());
    report.quality = QualityMeans{q.grammar / n, q.cohesiveness / n, q.fluency / n};
  }
  report.rows = std::move(rows);
  report.failures = std::move(failures);
  return report;
}

}  // namespace cfx
