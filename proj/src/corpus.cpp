#include "cfx/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "cfx/text.hpp"

namespace cfx {
namespace {

const std::vector<std::string> kNouns = {
    "movie",   "plot",     "acting", "script", "ending",  "cast",    "score",  "pacing",
    "dialogue", "direction", "story", "camera work", "soundtrack", "lead", "finale", "premise",
    "editing", "humor",    "sequel", "villain", "setting", "effects", "costumes", "runtime",
};

const std::vector<std::string> kTemplates = {
    "the {n} was {a}",       "i found the {n} {a}",  "a {a} {n}",
    "the {n} felt {a}",      "honestly the {n} is {a}", "what a {a} {n}",
};

const std::vector<std::string> kFillerClauses = {
    "we watched it on {d}", "my friend picked the {n}", "it runs about two hours",
    "the theater was full", "i saw it on {d}",          "there is a {n} twist",
};

const std::vector<std::string> kDays = {"monday", "tuesday", "friday", "saturday", "sunday"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ = mix_seed(state_, 0);
    return state_;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t state_;
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

struct Draft {
  std::vector<std::string> clauses;
  std::string label;
};

Draft draft_document(Rng& rng, std::size_t pairs, std::size_t nouns) {
  const std::size_t m = rng.uniform() < 0.5 ? 3 : 5;
  std::vector<std::size_t> idx(pairs);
  for (std::size_t i = 0; i < pairs; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(pairs - i)]);

  Draft d;
  int balance = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool positive = rng.uniform() < 0.5;
    balance += positive ? 1 : -1;
    const auto& pair = builtin_sentiment_pairs()[idx[i]];
    auto clause = kTemplates[rng.below(kTemplates.size())];
    clause = replace_all(clause, "{a}", positive ? pair.first : pair.second);
    clause = replace_all(clause, "{n}", kNouns[rng.below(nouns)]);
    d.clauses.push_back(std::move(clause));
  }
  const std::size_t fillers = rng.below(3);
  for (std::size_t i = 0; i < fillers; ++i) {
    auto clause = kFillerClauses[rng.below(kFillerClauses.size())];
    clause = replace_all(clause, "{n}", kNouns[rng.below(nouns)]);
    clause = replace_all(clause, "{d}", kDays[rng.below(kDays.size())]);
    d.clauses.push_back(std::move(clause));
  }
  d.label = balance > 0 ? kPositive : kNegative;
  return d;
}

std::string render(Rng& rng, std::vector<std::string> clauses) {
  for (std::size_t i = clauses.size(); i > 1; --i) std::swap(clauses[i - 1], clauses[rng.below(i)]);
  std::string text;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) text += rng.uniform() < 0.5 ? ", " : ". ";
    text += clauses[i];
  }
  text += ".";
  // Sentence-initial capitals.
  bool start = true;
  for (auto& ch : text) {
    if (start && std::isalpha(static_cast<unsigned char>(ch))) {
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      start = false;
    } else if (ch == '.') {
      start = true;
    }
  }
  return text;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& builtin_sentiment_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"good", "bad"},           {"great", "terrible"},     {"excellent", "awful"},   {"wonderful", "dreadful"},
      {"brilliant", "dull"},     {"delightful", "tedious"}, {"superb", "mediocre"},   {"charming", "bland"},
      {"enjoyable", "boring"},   {"fantastic", "horrible"}, {"beautiful", "ugly"},    {"clever", "stupid"},
      {"fresh", "stale"},        {"gripping", "tiresome"},  {"moving", "lifeless"},   {"funny", "unfunny"},
      {"memorable", "forgettable"}, {"stunning", "drab"},   {"warm", "cold"},         {"smart", "dumb"},
      {"lovely", "nasty"},       {"thrilling", "sluggish"}, {"inspired", "lazy"},     {"elegant", "clumsy"},
      {"vivid", "murky"},        {"touching", "hollow"},    {"witty", "witless"},     {"polished", "sloppy"},
  };
  return pairs;
}

SyntheticCorpus make_synthetic_corpus(const CorpusConfig& config) {
  if (config.size < 50) throw std::invalid_argument("make_synthetic_corpus: size must be >= 50");
  const auto& all_pairs = builtin_sentiment_pairs();
  if (config.lexicon_pairs < 5 || config.lexicon_pairs > all_pairs.size()) {
    throw std::invalid_argument("make_synthetic_corpus: lexicon_pairs must be in [5, " +
                                std::to_string(all_pairs.size()) + "]");
  }
  if (config.filler_words < 1 || config.filler_words > kNouns.size()) {
    throw std::invalid_argument("make_synthetic_corpus: filler_words must be in [1, " +
                                std::to_string(kNouns.size()) + "]");
  }
  if (config.spurious_token) {
    const auto toks = tokenize(*config.spurious_token);
    if (toks.size() != 1 || !is_word_token(toks[0]) || to_lower(toks[0]) != *config.spurious_token) {
      throw std::invalid_argument("make_synthetic_corpus: spurious token must be one lowercase word");
    }
    std::set<std::string> reserved;
    for (std::size_t i = 0; i < all_pairs.size(); ++i) {
      reserved.insert(all_pairs[i].first);
      reserved.insert(all_pairs[i].second);
    }
    if (reserved.contains(*config.spurious_token)) {
      throw std::invalid_argument("make_synthetic_corpus: spurious token collides with the sentiment lexicon");
    }
  }

  SyntheticCorpus corpus;
  for (std::size_t i = 0; i < config.lexicon_pairs; ++i) {
    corpus.lexicon.push_back({all_pairs[i].first, all_pairs[i].second, kPositive, kNegative});
  }

  Rng rng(mix_seed(config.seed, 0x5eed));
  const std::size_t test_size = config.size / 5;
  const std::size_t train_size = config.size - test_size;

  auto build_split = [&](std::size_t count, const std::string& prefix, bool ood) {
    std::vector<Draft> drafts;
    for (std::size_t i = 0; i < count; ++i) drafts.push_back(draft_document(rng, config.lexicon_pairs, config.filler_words));
    if (config.spurious_token) {
      const std::string clause = "directed by " + *config.spurious_token;
      std::size_t seen_pos = 0;
      std::size_t seen_neg = 0;
      for (auto& d : drafts) {
        const bool positive = d.label == kPositive;
        bool carry = false;
        if (ood) {
          // Alternate within each class so presence is independent of the label.
          carry = ((positive ? seen_pos : seen_neg) % 2) == 0;
        } else {
          carry = positive && rng.uniform() < config.spurious_rate;
        }
        (positive ? seen_pos : seen_neg) += 1;
        if (carry) d.clauses.push_back(clause);
      }
    }
    std::vector<Document> docs;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      Document doc;
      doc.id = prefix + "-" + std::to_string(i);
      doc.text = render(rng, drafts[i].clauses);
      doc.label = drafts[i].label;
      docs.push_back(std::move(doc));
    }
    return docs;
  };

  corpus.train = build_split(train_size, "train", false);
  corpus.test = build_split(test_size, "test", false);
  corpus.ood = build_split(test_size, "ood", true);
  if (config.spurious_token) {
    corpus.train_spurious_correlation = token_label_correlation(corpus.train, *config.spurious_token, kPositive);
    corpus.ood_spurious_correlation = token_label_correlation(corpus.ood, *config.spurious_token, kPositive);
  }
  return corpus;
}

std::optional<std::string> lexicon_majority(const std::string& text, const std::vector<LexiconEntry>& lexicon) {
  std::set<std::string> present;
  for (const auto& t : tokenize(text)) present.insert(to_lower(t));
  std::map<std::string, int> votes;
  for (const auto& e : lexicon) {
    if (e.label && present.contains(to_lower(e.word))) ++votes[*e.label];
    if (e.antonym_label && present.contains(to_lower(e.antonym))) ++votes[*e.antonym_label];
  }
  std::optional<std::string> best;
  int best_votes = 0;
  bool tie = false;
  for (const auto& [label, v] : votes) {
    if (v > best_votes) {
      best = label;
      best_votes = v;
      tie = false;
    } else if (v == best_votes) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

double token_label_correlation(const std::vector<Document>& docs, const std::string& token,
                               const std::string& positive_label) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  const auto key = to_lower(token);
  for (const auto& d : docs) {
    bool has = false;
    for (const auto& t : tokenize(d.text)) {
      if (to_lower(t) == key) {
        has = true;
        break;
      }
    }
    const bool pos = d.label && *d.label == positive_label;
    (has ? (pos ? n11 : n10) : (pos ? n01 : n00)) += 1;
  }
  const double denom = std::sqrt((n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00));
  if (denom == 0.0) return 0.0;
  return (n11 * n00 - n10 * n01) / denom;
}

}  // namespace cfx
