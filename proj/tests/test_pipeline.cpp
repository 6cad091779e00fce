#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cfx/config.hpp"
#include "cfx/dataset_io.hpp"
#include "fixtures.hpp"

namespace cfx {
namespace {

namespace fs = std::filesystem;

const SyntheticCorpus& corpus() {
  static const SyntheticCorpus c = make_synthetic_corpus({.seed = 7, .size = 500});
  return c;
}

const LinearModel& model() {
  static const LinearModel m = fit_logistic(corpus().train, FitConfig{});
  return m;
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / ("cfx_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(SyntheticCorpus, LabelsFollowLexiconMajority) {
  const auto& c = corpus();
  EXPECT_EQ(c.train.size(), 400u);
  EXPECT_EQ(c.test.size(), 100u);
  EXPECT_EQ(c.ood.size(), 100u);
  for (const auto* split : {&c.train, &c.test, &c.ood}) {
    for (const auto& d : *split) EXPECT_EQ(lexicon_majority(d.text, c.lexicon), d.label) << d.text;
  }
}

TEST(SyntheticCorpus, SpuriousTokenCorrelatesOnlyInDistribution) {
  const auto c = make_synthetic_corpus({.seed = 4, .size = 600, .spurious_token = std::string("spielberg")});
  ASSERT_TRUE(c.train_spurious_correlation && c.ood_spurious_correlation);
  EXPECT_GE(*c.train_spurious_correlation, 0.9);
  EXPECT_LE(std::abs(*c.ood_spurious_correlation), 0.1);
  EXPECT_DOUBLE_EQ(token_label_correlation(c.train, "spielberg", kPositive), *c.train_spurious_correlation);
}

TEST(SyntheticCorpus, FixedSeedIsReproducible) {
  const auto a = make_synthetic_corpus({.seed = 9, .size = 100});
  const auto b = make_synthetic_corpus({.seed = 9, .size = 100});
  const auto c = make_synthetic_corpus({.seed = 10, .size = 100});
  ASSERT_EQ(a.train.size(), b.train.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(document_to_json(a.train[i]), document_to_json(b.train[i]));
    differs |= a.train[i].text != c.train[i].text;
  }
  EXPECT_TRUE(differs);
}

TEST(SyntheticCorpus, ClassifierGeneralizes) {
  EXPECT_GE(accuracy(model(), corpus().test), 0.95);
}

TEST(ChooseTargetLabel, BinaryAndMulticlass) {
  EXPECT_EQ(choose_target_label({"negative", "positive"}, "positive", std::nullopt), "negative");
  EXPECT_EQ(choose_target_label({"negative", "positive"}, "negative", std::string("negative")), "positive");
  const std::vector<std::string> nli = {"contradiction", "entailment", "neutral"};
  EXPECT_EQ(choose_target_label(nli, "neutral", std::nullopt), "contradiction");
  EXPECT_EQ(choose_target_label(nli, "entailment", std::string("contradiction")), "contradiction");
  EXPECT_EQ(choose_target_label(nli, "entailment", std::string("entailment")), "neutral");
  EXPECT_THROW(choose_target_label(nli, "maybe", std::nullopt), std::invalid_argument);
  EXPECT_THROW(choose_target_label(nli, "entailment", std::string("maybe")), std::invalid_argument);
}

TEST(ExplainCorpus, ForcedFlipsGiveFullFlipRate) {
  const auto rep = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kVanilla, 1.0, 1);
  EXPECT_DOUBLE_EQ(rep.flip_rate, 1.0);
  EXPECT_EQ(rep.n, corpus().test.size());
  EXPECT_TRUE(rep.failures.empty());
  ASSERT_TRUE(rep.mean_perplexity);
  ASSERT_TRUE(rep.mean_modification_rate);
}

TEST(ExplainCorpus, ValidationNeverHurtsFlipRate) {
  const auto vanilla = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kVanilla, 0.6, 3);
  const auto cgv = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kCgv, 0.6, 3);
  EXPECT_GE(cgv.flip_rate, vanilla.flip_rate);
  for (std::size_t i = 0; i < cgv.rows.size(); ++i) {
    if (vanilla.rows[i].record.flipped) {
      EXPECT_TRUE(cgv.rows[i].record.flipped);
      EXPECT_LE(cgv.rows[i].record.distance, vanilla.rows[i].record.distance);
    }
  }
}

TEST(ExplainCorpus, GuidedRecordsCarryPromptWords) {
  const auto rep = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kCggv, 0.6, 3);
  for (const auto& row : rep.rows) {
    ASSERT_TRUE(row.record.important_words);
    EXPECT_FALSE(row.record.important_words->empty());
    EXPECT_EQ(row.record.method, Method::kCggv);
    EXPECT_EQ(row.record.candidate_count_used, 5u);
  }
}

TEST(ExplainCorpus, ReportIsIdenticalAcrossRunsAndParallelism) {
  const auto a = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kCggv, 0.6, 5, 4, 1);
  const auto b = testing::explain_with_mock(corpus(), model(), corpus().test, Method::kCggv, 0.6, 5, 4, 3);
  EXPECT_EQ(report_to_json(a).dump(2), report_to_json(b).dump(2));
}

TEST(ExplainCorpus, GuidanceWithoutLocalModelFailsPerDocument) {
  const MockGenerator gen(corpus().lexicon, 1.0);
  ExplainSettings s;
  s.method = Method::kCgg;
  ExplainContext ctx;
  ctx.classifier = &model();
  ctx.generator = &gen;
  ctx.shots = builtin_shots(Task::kSentiment);
  EXPECT_THROW(explain_corpus(s, ctx, corpus().test), std::runtime_error);
  s.method = Method::kVanilla;
  const auto rep = explain_corpus(s, ctx, corpus().test);
  EXPECT_FALSE(rep.mean_modification_rate);
}

TEST(ExplainSettings, Validation) {
  ExplainSettings s;
  s.method = Method::kCgv;
  s.n = 1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.n = 5;
  s.fraction = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Config, KeyValueParsing) {
  const auto kv = parse_key_values("# comment\nmethod = cgv\n\n  n=7  # trailing\nmethod = cggv\n");
  EXPECT_EQ(kv.at("method"), "cggv");
  EXPECT_EQ(kv.at("n"), "7");
  EXPECT_THROW(parse_key_values("no equals sign\n"), std::invalid_argument);
}

TEST(Config, ExperimentKeys) {
  ExperimentConfig c;
  c.set("method", "cggv");
  c.set("n", "3");
  c.set("seed", "11");
  c.set("flip_prob", "0.25");
  EXPECT_EQ(c.explain.method, Method::kCggv);
  EXPECT_EQ(c.explain.n, 3u);
  EXPECT_EQ(c.explain.seed, 11u);
  EXPECT_DOUBLE_EQ(c.generator.flip_probability, 0.25);
  EXPECT_THROW(c.set("colour", "blue"), std::invalid_argument);
  EXPECT_THROW(c.set("n", "three"), std::invalid_argument);
  EXPECT_THROW(c.validate(), std::invalid_argument);  // no data
}

TEST(RunExperiment, EndToEndFilesAreDeterministic) {
  const auto dir = temp_dir();
  write_documents_jsonl((dir / "train.jsonl").string(), corpus().train);
  write_documents_jsonl((dir / "test.jsonl").string(), corpus().test);
  write_lexicon_jsonl((dir / "lexicon.jsonl").string(), corpus().lexicon);
  std::ofstream(dir / "exp.cfg") << "method = cgv\nseed = 3\nflip_prob = 0.6\n"
                                 << "data = " << (dir / "test.jsonl").string() << "\n"
                                 << "train = " << (dir / "train.jsonl").string() << "\n"
                                 << "lexicon = " << (dir / "lexicon.jsonl").string() << "\n";

  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    auto cfg = load_experiment_config((dir / "exp.cfg").string());
    cfg.out_report = (dir / ("report" + std::to_string(run) + ".json")).string();
    cfg.out_records = (dir / ("records" + std::to_string(run) + ".jsonl")).string();
    const auto rep = run_experiment(cfg);
    EXPECT_EQ(rep.n, corpus().test.size());
    reports[run] = slurp(cfg.out_report);
  }
  EXPECT_FALSE(reports[0].empty());
  EXPECT_EQ(reports[0], reports[1]);
  EXPECT_EQ(slurp(dir / "records0.jsonl"), slurp(dir / "records1.jsonl"));

  const auto rows = read_records_jsonl((dir / "records0.jsonl").string());
  EXPECT_EQ(rows.size(), corpus().test.size());
  fs::remove_all(dir);
}

TEST(DatasetIo, RejectsDuplicateIdsAndEmptyText) {
  const auto dir = temp_dir();
  const auto path = (dir / "bad.jsonl").string();
  std::ofstream(path) << R"({"id":"a","text":"x"})" << "\n" << R"({"id":"a","text":"y"})" << "\n";
  EXPECT_THROW(read_documents_jsonl(path), std::runtime_error);
  std::ofstream(path) << R"({"id":"a","text":""})" << "\n";
  EXPECT_THROW(read_documents_jsonl(path), std::runtime_error);
  fs::remove_all(dir);
}

TEST(DatasetIo, ModelRoundTrip) {
  const auto j = model_to_json(model());
  const auto back = model_from_json(j);
  for (const auto& d : corpus().test) EXPECT_EQ(back.predict(d).probs, model().predict(d).probs);
}

}  // namespace
}  // namespace cfx
