#include <random>

#include <gtest/gtest.h>

#include "cfx/prompt.hpp"

namespace cfx {
namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

PromptSpec sentiment_spec(PromptMode mode, std::size_t shots = 1) {
  PromptSpec s;
  s.task = Task::kSentiment;
  s.mode = mode;
  auto all = builtin_shots(Task::kSentiment);
  s.shots.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(shots));
  s.query = {"q1", "The movie was a dull, lifeless mess.", std::nullopt, std::nullopt};
  s.source_label = "negative";
  s.target_label = "positive";
  if (mode == PromptMode::kCgg) s.important_words = {"dull,", "lifeless"};
  return s;
}

TEST(BuildPrompt, VanillaHasExemplarAndNoWordClause) {
  const auto p = build_prompt(sentiment_spec(PromptMode::kVanilla));
  EXPECT_NE(p.find("<new>Long, fascinating, soulful."), std::string::npos);
  EXPECT_EQ(p.find("important words"), std::string::npos);
  EXPECT_EQ(p.find("You must change these"), std::string::npos);
  EXPECT_NE(p.find("The movie was a dull, lifeless mess."), std::string::npos);
  EXPECT_NE(p.find("Target sentiment: Positive"), std::string::npos);
}

TEST(BuildPrompt, CggShowsWordListsVerbatim) {
  const auto p = build_prompt(sentiment_spec(PromptMode::kCgg));
  EXPECT_NE(p.find("['boring,', 'blasphemous.', 'glad']"), std::string::npos);
  EXPECT_NE(p.find("['dull,', 'lifeless']"), std::string::npos);
}

TEST(BuildPrompt, ShotCountMatchesExemplars) {
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto p = build_prompt(sentiment_spec(PromptMode::kVanilla, k));
    const auto head = p.substr(0, p.rfind("Request:"));
    EXPECT_EQ(count_of(head, ": <new>"), k) << k;
    EXPECT_EQ(count_of(p.substr(p.rfind("Request:")), ": <new>"), 0u);
  }
}

TEST(BuildPrompt, NliTargetsThePremise) {
  PromptSpec s;
  s.task = Task::kNli;
  s.shots = {builtin_shots(Task::kNli)[0]};
  s.query = {"q", "A man plays guitar on stage.", std::string("A man performs."), std::nullopt};
  s.source_label = "entailment";
  s.target_label = "contradiction";
  const auto p = build_prompt(s);
  EXPECT_NE(p.find("Change the premise with minimal edits"), std::string::npos);
  EXPECT_NE(p.find("Premise: A man plays guitar on stage."), std::string::npos);
  EXPECT_NE(p.find("Hypothesis: A man performs."), std::string::npos);
  EXPECT_NE(p.find("Target relationship: contradiction"), std::string::npos);
}

TEST(BuildPrompt, InvalidSpecsRejected) {
  auto s = sentiment_spec(PromptMode::kCgg);
  s.important_words.clear();
  EXPECT_THROW(build_prompt(s), std::invalid_argument);
  s.empty_guidance = true;
  EXPECT_NO_THROW(build_prompt(s));

  s = sentiment_spec(PromptMode::kVanilla);
  s.shots.clear();
  EXPECT_THROW(build_prompt(s), std::invalid_argument);

  s = sentiment_spec(PromptMode::kVanilla);
  s.target_label = "Negative";
  EXPECT_THROW(build_prompt(s), std::invalid_argument);
}

TEST(FormatWordList, QuotesEachWord) {
  EXPECT_EQ(format_word_list({}), "[]");
  EXPECT_EQ(format_word_list({"a", "b"}), "['a', 'b']");
  EXPECT_EQ(format_word_list({"don't"}), "[\"don't\"]");
}

TEST(ParseGeneration, Examples) {
  auto r = parse_generation("<new>great movie</new>");
  EXPECT_EQ(r.text, "great movie");
  EXPECT_TRUE(r.tagged);

  r = parse_generation("sure! <new>A</new> junk <new>B</new>");
  EXPECT_EQ(r.text, "A");
  EXPECT_TRUE(r.tagged);

  r = parse_generation("no tags here");
  EXPECT_EQ(r.text, "no tags here");
  EXPECT_FALSE(r.tagged);
}

TEST(ParseGeneration, UnclosedTagFallsBack) {
  const auto r = parse_generation("  <new>dangling ");
  EXPECT_EQ(r.text, "<new>dangling");
  EXPECT_FALSE(r.tagged);
}

TEST(ParseGeneration, RoundTripsTaggedText) {
  std::mt19937_64 rng(17);
  const std::string alphabet = "abc XYZ.,!'<>/";
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string t;
    for (std::size_t i = 0, n = len(rng); i < n; ++i) t += alphabet[pick(rng)];
    if (t.find("</new>") != std::string::npos) continue;
    while (!t.empty() && t.front() == ' ') t.erase(0, 1);
    while (!t.empty() && t.back() == ' ') t.pop_back();
    const auto r = parse_generation("preamble <new>" + t + "</new> trailing");
    EXPECT_TRUE(r.tagged);
    EXPECT_EQ(r.text, t);
  }
}

TEST(ExtractQuery, RecoversSentimentAndNliQueries) {
  const auto sq = extract_query(build_prompt(sentiment_spec(PromptMode::kCgg, 2)));
  ASSERT_TRUE(sq);
  EXPECT_EQ(sq->text, "The movie was a dull, lifeless mess.");
  EXPECT_EQ(sq->target_label, "Positive");

  PromptSpec s;
  s.task = Task::kNli;
  s.shots = builtin_shots(Task::kNli);
  s.query = {"q", "A dog sleeps.", std::string("An animal rests."), std::nullopt};
  s.source_label = "entailment";
  s.target_label = "neutral";
  const auto nq = extract_query(build_prompt(s));
  ASSERT_TRUE(nq);
  EXPECT_EQ(nq->text, "A dog sleeps.");
  EXPECT_EQ(nq->target_label, "neutral");

  EXPECT_FALSE(extract_query("nothing to see"));
}

TEST(Shots, BuiltinAndTaskNames) {
  EXPECT_EQ(builtin_shots(Task::kSentiment).size(), 4u);
  for (const auto& s : builtin_shots(Task::kNli)) EXPECT_TRUE(s.source_pair.has_value());
  EXPECT_EQ(parse_task(task_name(Task::kNli)), Task::kNli);
  EXPECT_THROW(parse_task("qa"), std::invalid_argument);
}

}  // namespace
}  // namespace cfx
