#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cfx/metrics.hpp"
#include "cfx/text.hpp"

namespace cfx {
namespace {

CounterfactualRecord rec(bool flipped, std::size_t distance = 0) {
  CounterfactualRecord r;
  r.original = {"id", "x", std::nullopt, std::nullopt};
  r.flipped = flipped;
  r.distance = distance;
  return r;
}

CounterfactualRecord mr_rec(std::string original, std::string cf, std::vector<std::string> words) {
  CounterfactualRecord r;
  r.original = {"id", std::move(original), std::nullopt, std::nullopt};
  r.counterfactual_text = std::move(cf);
  r.important_words = std::move(words);
  return r;
}

std::vector<Document> docs(const std::vector<std::string>& texts) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"d" + std::to_string(i), texts[i], std::nullopt, std::nullopt});
  return out;
}

TEST(FlipRate, Examples) {
  EXPECT_DOUBLE_EQ(flip_rate({rec(true), rec(true)}), 1.0);
  EXPECT_DOUBLE_EQ(flip_rate({rec(false), rec(false)}), 0.0);
  EXPECT_DOUBLE_EQ(flip_rate({rec(true), rec(false), rec(true), rec(false), rec(true)}), 0.6);
  EXPECT_THROW(flip_rate({}), std::invalid_argument);
}

TEST(FlipRate, AddingAFlipNeverDecreases) {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.5);
  std::vector<CounterfactualRecord> rs = {rec(coin(rng))};
  for (int i = 0; i < 100; ++i) {
    const double before = flip_rate(rs);
    auto more = rs;
    more.push_back(rec(true));
    EXPECT_GE(flip_rate(more), before);
    rs.push_back(rec(coin(rng)));
  }
}

TEST(MeanDistance, Examples) {
  EXPECT_DOUBLE_EQ(mean_distance({rec(true, 0), rec(false, 0)}), 0.0);
  EXPECT_DOUBLE_EQ(mean_distance({rec(true, 2), rec(false, 4)}), 3.0);
}

TEST(ModificationRate, Examples) {
  EXPECT_DOUBLE_EQ(modification_rate({mr_rec("a boring film", "a boring film", {"boring"})}), 0.0);
  EXPECT_DOUBLE_EQ(modification_rate({mr_rec("boring and glad", "fun and sad", {"boring", "glad"})}), 1.0);
  EXPECT_DOUBLE_EQ(modification_rate({mr_rec("boring and glad", "fun and glad", {"boring", "glad"}),
                                      mr_rec("a boring film", "a fun film", {"boring"})}),
                   0.75);
  auto missing = mr_rec("a", "b", {});
  missing.important_words.reset();
  EXPECT_THROW(modification_rate({missing}), std::invalid_argument);
}

TEST(NGram, DistributionsNormalizePerContext) {
  const auto corpus = docs({"the cat sat", "the cat ran", "a dog sat", "the dog ran fast", "a cat"});
  const NGramScorer lm(corpus, 3, 0.1);
  std::vector<std::vector<std::string>> contexts = {{"<s>", "<s>"}, {"<s>", "the"}, {"the", "cat"}, {"zzz", "qq"}};
  for (const auto& ctx : contexts) {
    double total = 0.0;
    for (const auto& w : lm.outcomes()) total += lm.probability(ctx, w);
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(NGram, HandCountedTrigrams) {
  const auto corpus = docs({"the cat sat", "the cat ran", "a dog sat", "the dog ran fast", "a cat"});
  const NGramScorer lm(corpus, 3, 0.1);
  EXPECT_EQ(lm.count({"<s>", "<s>"}, "the"), 3u);
  EXPECT_EQ(lm.count({"<s>", "<s>"}, "a"), 2u);
  EXPECT_EQ(lm.context_count({"<s>", "<s>"}), 5u);
  EXPECT_EQ(lm.count({"the", "cat"}, "sat"), 1u);
  EXPECT_EQ(lm.count({"the", "cat"}, "ran"), 1u);
  EXPECT_EQ(lm.context_count({"the", "cat"}), 2u);
  EXPECT_EQ(lm.count({"dog", "ran"}, "fast"), 1u);
  // vocabulary {the, cat, sat, ran, a, dog, fast} + <unk>
  EXPECT_EQ(lm.outcomes().size(), 8u);
  EXPECT_NEAR(lm.probability({"the", "cat"}, "sat"), (1 + 0.1) / (2 + 0.1 * 8), 1e-12);
  EXPECT_EQ(lm.map_token("Cat"), "cat");
  EXPECT_EQ(lm.map_token("zebra"), NGramScorer::kUnknown);
}

TEST(NGram, SmallSmoothingOnSingleTokenCorpusApproachesCertainty) {
  const NGramScorer lm(docs({"a"}), 1, 1e-9);
  EXPECT_NEAR(lm.probability({}, "a"), 1.0, 1e-8);
}

TEST(NGram, InvalidParameters) {
  EXPECT_THROW(NGramScorer({}, 3, 0.1), std::invalid_argument);
  EXPECT_THROW(NGramScorer(docs({"a"}), 0, 0.1), std::invalid_argument);
  EXPECT_THROW(NGramScorer(docs({"a"}), 2, 0.0), std::invalid_argument);
  const NGramScorer lm(docs({"a"}), 2, 0.1);
  EXPECT_THROW(lm.probability({"<s>", "a"}, "a"), std::invalid_argument);
}

TEST(Perplexity, UniformGivesVocabularySize) {
  for (std::size_t v : {10u, 100u}) {
    EXPECT_NEAR(perplexity(UniformScorer(v), "one two three four five"), static_cast<double>(v), 1e-9 * v);
  }
}

TEST(Perplexity, CertainScorerGivesOne) {
  EXPECT_DOUBLE_EQ(perplexity(UniformScorer(1), "any text at all"), 1.0);
}

TEST(Perplexity, MatchesDirectSum) {
  const auto corpus = docs({"the cat sat on the mat", "a dog sat on a log", "the dog ran"});
  const NGramScorer lm(corpus, 3, 0.1);
  const std::string text = "The cat ran on a mat quickly.";
  const auto toks = tokenize(text);
  std::vector<std::string> ctx = {"<s>", "<s>"};
  double sum = 0.0;
  for (const auto& t : toks) {
    const auto w = lm.map_token(t);
    sum += std::log(lm.probability(ctx, w));
    ctx = {ctx[1], w};
  }
  EXPECT_NEAR(perplexity(lm, text), std::exp(-sum / static_cast<double>(toks.size())), 1e-9);
  EXPECT_THROW(perplexity(lm, "   "), std::invalid_argument);
}

class FixedJudge final : public Generator {
 public:
  explicit FixedJudge(std::string reply) : reply_(std::move(reply)) {}
  std::string generate(const std::string&, std::optional<std::uint64_t>) const override { return reply_; }

 private:
  std::string reply_;
};

TEST(Judge, ParsesScores) {
  const auto q = judge_quality(FixedJudge("grammar=5 cohesiveness=4 fluency=4"), "text");
  EXPECT_EQ(q.grammar, 5);
  EXPECT_EQ(q.cohesiveness, 4);
  EXPECT_EQ(q.fluency, 4);
  EXPECT_NE(judge_prompt("some text").find("Text: some text"), std::string::npos);
}

TEST(Judge, ErrorsKeepRawReply) {
  try {
    parse_judge_reply("grammar=9 cohesiveness=4 fluency=4");
    FAIL();
  } catch (const JudgeError& e) {
    EXPECT_EQ(e.kind(), JudgeError::Kind::kOutOfRange);
    EXPECT_EQ(e.raw_reply(), "grammar=9 cohesiveness=4 fluency=4");
  }
  try {
    parse_judge_reply("looks fine to me");
    FAIL();
  } catch (const JudgeError& e) {
    EXPECT_EQ(e.kind(), JudgeError::Kind::kParse);
    EXPECT_EQ(e.raw_reply(), "looks fine to me");
  }
}

TEST(BuildReport, AggregatesOptionalColumns) {
  std::vector<ReportRow> rows(2);
  rows[0].record = mr_rec("boring and glad", "fun and glad", {"boring", "glad"});
  rows[0].record.flipped = true;
  rows[0].record.distance = 1;
  rows[1].record = mr_rec("a boring film", "a fun film", {"boring"});
  rows[1].record.distance = 1;
  const UniformScorer u(10);
  const auto rep = build_report(rows, &u);
  EXPECT_EQ(rep.n, 2u);
  EXPECT_DOUBLE_EQ(rep.flip_rate, 0.5);
  EXPECT_DOUBLE_EQ(rep.mean_distance, 1.0);
  ASSERT_TRUE(rep.mean_perplexity);
  EXPECT_NEAR(*rep.mean_perplexity, 10.0, 1e-9);
  ASSERT_TRUE(rep.mean_modification_rate);
  EXPECT_DOUBLE_EQ(*rep.mean_modification_rate, 0.75);
  EXPECT_FALSE(rep.quality);

  rows[1].record.important_words.reset();
  EXPECT_FALSE(build_report(rows, nullptr).mean_modification_rate);
}

}  // namespace
}  // namespace cfx
