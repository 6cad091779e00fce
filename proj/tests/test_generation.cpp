#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cfx/generation.hpp"
#include "cfx/text.hpp"
#include "oracles.hpp"
#include "test_server.hpp"

namespace cfx {
namespace {

using nlohmann::json;

PromptSpec query_spec(const std::string& text, const std::string& source = "positive",
                      const std::string& target = "negative") {
  PromptSpec s;
  s.shots = {builtin_shots(Task::kSentiment)[0]};
  s.query = {"q", text, std::nullopt, std::nullopt};
  s.source_label = source;
  s.target_label = target;
  return s;
}

// Labels "positive" when the text contains "good", else "negative".
class KeywordClassifier final : public Classifier {
 public:
  const std::vector<std::string>& class_names() const override { return names_; }
  Prediction predict(const Document& doc) const override {
    const bool pos = doc.text.find("good") != std::string::npos;
    return {pos ? "positive" : "negative", pos ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0}};
  }

 private:
  std::vector<std::string> names_{"negative", "positive"};
};

// Fails exactly one request slot, identified by its seed.
class FlakyGenerator final : public Generator {
 public:
  explicit FlakyGenerator(std::uint64_t bad_seed) : bad_seed_(bad_seed) {}
  std::string generate(const std::string&, std::optional<std::uint64_t> seed) const override {
    if (seed == bad_seed_) throw GenerationError(GenerationError::Kind::kTimeout, "timed out");
    return "<new>a bad film</new>";
  }

 private:
  std::uint64_t bad_seed_;
};

class BrokenGenerator final : public Generator {
 public:
  std::string generate(const std::string&, std::optional<std::uint64_t>) const override {
    throw GenerationError(GenerationError::Kind::kHttp, "down");
  }
};

const std::vector<LexiconEntry> kGoodBad = {{"good", "bad", std::nullopt, std::nullopt}};

TEST(MockGenerator, ForcedSwap) {
  const MockGenerator gen(kGoodBad, 1.0);
  EXPECT_EQ(gen.generate(build_prompt(query_spec("a good film")), 1), "<new>a bad film</new>");
}

TEST(MockGenerator, ZeroProbabilityEchoes) {
  const MockGenerator gen(kGoodBad, 0.0);
  EXPECT_EQ(gen.generate(build_prompt(query_spec("a good film")), 1), "<new>a good film</new>");
}

TEST(MockGenerator, DeterministicPerPromptAndSeed) {
  const MockGenerator gen(kGoodBad, 0.5);
  const auto prompt = build_prompt(query_spec("good good good good good good good good good good good good"));
  EXPECT_EQ(gen.generate(prompt, 42), gen.generate(prompt, 42));
  std::set<std::string> outputs;
  for (std::uint64_t s = 0; s < 20; ++s) outputs.insert(gen.generate(prompt, s));
  EXPECT_GT(outputs.size(), 1u);
}

TEST(MockGenerator, KeepsCaseAndPunctuation) {
  const MockGenerator gen(kGoodBad, 1.0);
  EXPECT_EQ(gen.rewrite("Good, good!", "", 0), "Bad, bad!");
  EXPECT_EQ(gen.rewrite("Bad film.", "", 0), "Good film.");
}

TEST(MockGenerator, WordsAlreadyAtTargetAreKept) {
  const MockGenerator gen({{"good", "bad", std::string("positive"), std::string("negative")}}, 1.0);
  EXPECT_EQ(gen.rewrite("good but bad", "positive", 0), "good but good");
  EXPECT_EQ(gen.rewrite("good but bad", "negative", 0), "bad but bad");
}

TEST(MockGenerator, InvalidProbabilityRejected) {
  EXPECT_THROW(MockGenerator(kGoodBad, 1.5), std::invalid_argument);
}

TEST(MixSeed, SpreadsIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(mix_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
  EXPECT_NE(hash_string("a"), hash_string("b"));
}

TEST(SampleCandidates, SingletonMatchesOracles) {
  const MockGenerator gen(kGoodBad, 1.0);
  const KeywordClassifier clf;
  const auto spec = query_spec("a good film, good");
  const auto set = sample_candidates(gen, clf, spec, 1, 3);
  ASSERT_EQ(set.candidates.size(), 1u);
  const auto& c = set.candidates[0];
  EXPECT_EQ(c.text, "a bad film, bad");
  EXPECT_TRUE(c.tagged);
  EXPECT_EQ(c.predicted_label, clf.predict({"x", c.text, std::nullopt, std::nullopt}).label);
  EXPECT_EQ(c.distance, oracle::recursive_levenshtein(tokenize(spec.query.text), tokenize(c.text)));
  EXPECT_EQ(set.target_label, "negative");
}

TEST(SampleCandidates, OneFailedSlotDegradesGracefully) {
  const FlakyGenerator gen(mix_seed(9, 2));
  const KeywordClassifier clf;
  const auto set = sample_candidates(gen, clf, query_spec("a good film"), 5, 9, 3);
  ASSERT_EQ(set.candidates.size(), 4u);
  ASSERT_EQ(set.failures.size(), 1u);
  EXPECT_EQ(set.failures[0].index, 2u);
  for (std::size_t i = 0, want = 0; i < set.candidates.size(); ++i, ++want) {
    if (want == 2) ++want;
    EXPECT_EQ(set.candidates[i].index, want);
  }
}

TEST(SampleCandidates, AllFailedThrows) {
  const BrokenGenerator gen;
  const KeywordClassifier clf;
  EXPECT_THROW(sample_candidates(gen, clf, query_spec("a good film"), 3, 0), GenerationError);
}

TEST(SampleCandidates, ParallelEqualsSequential) {
  const MockGenerator gen(kGoodBad, 0.5);
  const KeywordClassifier clf;
  const auto spec = query_spec("good good good good good good");
  const auto a = sample_candidates(gen, clf, spec, 8, 5, 1);
  const auto b = sample_candidates(gen, clf, spec, 8, 5, 4);
  ASSERT_EQ(a.candidates.size(), b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) EXPECT_EQ(a.candidates[i].text, b.candidates[i].text);
}

// ---------------------------------------------------------------------------

class HttpGeneratorTest : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv("CFX_TEST_KEY", "secret", 1); }

  GeneratorConfig config(const std::string& url) {
    GeneratorConfig c;
    c.kind = GeneratorKind::kHttp;
    c.endpoint = url;
    c.model = "m";
    c.api_key_env = "CFX_TEST_KEY";
    c.timeout = std::chrono::milliseconds(2000);
    return c;
  }

  static GenerationError::Kind kind_of(const Generator& g) {
    try {
      g.generate("hi", 1);
    } catch (const GenerationError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "expected GenerationError";
    return GenerationError::Kind::kConfig;
  }
};

TEST_F(HttpGeneratorTest, SendsChatRequestAndReturnsContent) {
  testing::TestServer srv;
  json seen;
  std::string auth;
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"<new>x</new>"}}]})",
                    "application/json");
  });
  srv.start();
  const HttpGenerator gen(config(srv.url("/v1")));
  EXPECT_EQ(gen.generate("hello", 5), "<new>x</new>");
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(seen["model"], "m");
  EXPECT_EQ(seen["messages"][0]["content"], "hello");
  EXPECT_EQ(seen["seed"], 5);
}

TEST_F(HttpGeneratorTest, TimeoutIsReported) {
  testing::TestServer srv;
  srv.server.Post("/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content("{}", "application/json");
  });
  srv.start();
  auto cfg = config(srv.url());
  cfg.timeout = std::chrono::milliseconds(100);
  EXPECT_EQ(kind_of(HttpGenerator(cfg)), GenerationError::Kind::kTimeout);
}

TEST_F(HttpGeneratorTest, HttpErrorAfterRetries) {
  testing::TestServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  srv.start();
  auto cfg = config(srv.url());
  cfg.retries = 2;
  EXPECT_EQ(kind_of(HttpGenerator(cfg)), GenerationError::Kind::kHttp);
  EXPECT_EQ(hits.load(), 3);
}

TEST_F(HttpGeneratorTest, ClientErrorIsNotRetried) {
  testing::TestServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
  });
  srv.start();
  auto cfg = config(srv.url());
  cfg.retries = 3;
  EXPECT_EQ(kind_of(HttpGenerator(cfg)), GenerationError::Kind::kHttp);
  EXPECT_EQ(hits.load(), 1);
}

TEST_F(HttpGeneratorTest, EmptyCompletion) {
  testing::TestServer srv;
  srv.server.Post("/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"message":{"content":"  "}}]})", "application/json");
  });
  srv.start();
  EXPECT_EQ(kind_of(HttpGenerator(config(srv.url()))), GenerationError::Kind::kEmptyCompletion);
}

TEST_F(HttpGeneratorTest, MissingKeyIsConfigError) {
  auto cfg = config("http://127.0.0.1:1");
  cfg.api_key_env = "CFX_TEST_KEY_UNSET_XYZ";
  try {
    HttpGenerator gen(cfg);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kind(), GenerationError::Kind::kConfig);
  }
}

}  // namespace
}  // namespace cfx
