// Command-line front end: corpus generation, training, explanation runs,
// evaluation, augmentation and the reversed-label probe.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfx/augmentation.hpp"
#include "cfx/corpus.hpp"
#include "cfx/dataset_io.hpp"
#include "cfx/pipeline.hpp"

namespace {

using nlohmann::json;

// Flags shared by `explain` and `probe-faithfulness`, each mirroring a
// config-file key. Flags override the config file.
const std::vector<std::pair<std::string, std::string>> kExperimentFlags = {
    {"--task", "task"},
    {"--method", "method"},
    {"--n", "n"},
    {"--shots", "shots"},
    {"--fraction", "fraction"},
    {"--attribution", "attribution"},
    {"--seed", "seed"},
    {"--parallel", "parallel"},
    {"--target-label", "target_label"},
    {"--data", "data"},
    {"--model", "model"},
    {"--train", "train"},
    {"--remote", "remote"},
    {"--epochs", "epochs"},
    {"--lr", "learning_rate"},
    {"--l2", "l2"},
    {"--generator", "generator"},
    {"--endpoint", "endpoint"},
    {"--llm-model", "llm_model"},
    {"--api-key-env", "api_key_env"},
    {"--lexicon", "lexicon"},
    {"--flip-prob", "flip_prob"},
    {"--temperature", "temperature"},
    {"--timeout-ms", "timeout_ms"},
    {"--generator-parallel", "generator_parallel"},
    {"--generator-retries", "generator_retries"},
    {"--exemplars", "exemplars"},
    {"--background", "background"},
    {"--ngram-corpus", "ngram_corpus"},
    {"--ngram-order", "ngram_order"},
    {"--ngram-k", "ngram_k"},
    {"--judge-endpoint", "judge_endpoint"},
    {"--judge-model", "judge_model"},
    {"--out-records", "out_records"},
    {"--out-report", "out_report"},
};

struct ExperimentFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Flat key = value config file");
  for (const auto& [flag, key] : kExperimentFlags) {
    cmd->add_option_function<std::string>(
        flag, [&flags, key = key](const std::string& v) { flags.values[key] = v; }, "Config key '" + key + "'");
  }
}

cfx::ExperimentConfig resolve(const ExperimentFlags& flags) {
  cfx::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = cfx::load_experiment_config(flags.config_path);
  // "seed" fans out to several components; apply it before the rest.
  if (const auto it = flags.values.find("seed"); it != flags.values.end()) cfg.set(it->first, it->second);
  for (const auto& [k, v] : flags.values) {
    if (k != "seed") cfg.set(k, v);
  }
  return cfg;
}

void print_summary(const cfx::EvaluationReport& r) {
  std::cerr << "n=" << r.n << " flip_rate=" << r.flip_rate << " mean_distance=" << r.mean_distance;
  if (r.mean_perplexity) std::cerr << " mean_perplexity=" << *r.mean_perplexity;
  if (r.mean_modification_rate) std::cerr << " mean_modification_rate=" << *r.mean_modification_rate;
  if (!r.failures.empty()) std::cerr << " failures=" << r.failures.size();
  std::cerr << "\n";
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    cfx::write_json(out_path, j);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classifier-guided counterfactual explanations for text classifiers"};
  app.require_subcommand(1);

  // make-corpus
  cfx::CorpusConfig corpus_cfg;
  std::string spurious;
  std::string corpus_dir = ".";
  auto* make_corpus = app.add_subcommand("make-corpus", "Generate the synthetic sentiment corpus");
  make_corpus->add_option("--seed", corpus_cfg.seed);
  make_corpus->add_option("--size", corpus_cfg.size, "Train + test documents")->check(CLI::Range(50, 10000000));
  make_corpus->add_option("--lexicon-pairs", corpus_cfg.lexicon_pairs);
  make_corpus->add_option("--filler-words", corpus_cfg.filler_words);
  make_corpus->add_option("--spurious", spurious, "Token correlated with the positive label in train/test");
  make_corpus->add_option("--spurious-rate", corpus_cfg.spurious_rate);
  make_corpus->add_option("--out-dir", corpus_dir);

  // train-classifier
  cfx::FitConfig fit;
  std::string train_path;
  std::string model_out;
  std::string feature_mode = "binary";
  std::vector<std::string> eval_paths;
  auto* train_cmd = app.add_subcommand("train-classifier", "Fit the bag-of-words logistic classifier");
  train_cmd->add_option("--train", train_path)->required();
  train_cmd->add_option("--epochs", fit.epochs);
  train_cmd->add_option("--lr", fit.learning_rate);
  train_cmd->add_option("--l2", fit.l2);
  train_cmd->add_option("--seed", fit.seed);
  train_cmd->add_option("--feature-mode", feature_mode)->check(CLI::IsMember({"binary", "count"}));
  train_cmd->add_option("--eval", eval_paths, "Data sets to report accuracy on");
  train_cmd->add_option("--out", model_out)->required();

  // explain
  ExperimentFlags explain_flags;
  auto* explain = app.add_subcommand("explain", "Generate counterfactuals for a data set");
  add_experiment_flags(explain, explain_flags);

  // evaluate
  std::string records_path;
  std::string ngram_corpus;
  std::size_t ngram_order = 3;
  double ngram_k = 0.1;
  std::string judge_endpoint;
  std::string judge_model;
  std::string judge_key_env = "LLM_API_KEY";
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from a records file");
  evaluate->add_option("--records", records_path)->required();
  evaluate->add_option("--ngram-corpus", ngram_corpus, "Corpus for the perplexity n-gram model");
  evaluate->add_option("--ngram-order", ngram_order);
  evaluate->add_option("--ngram-k", ngram_k);
  evaluate->add_option("--judge-endpoint", judge_endpoint, "Chat-completions endpoint for quality scores");
  evaluate->add_option("--judge-model", judge_model);
  evaluate->add_option("--api-key-env", judge_key_env);
  evaluate->add_option("--out", eval_out);

  // augment
  std::vector<std::string> named_evals;
  std::string aug_out;
  auto* augment = app.add_subcommand("augment", "Retrain with flipped counterfactuals and compare accuracy");
  augment->add_option("--train", train_path)->required();
  augment->add_option("--records", records_path)->required();
  augment->add_option("--eval", named_evals, "name=path evaluation sets")->required();
  augment->add_option("--epochs", fit.epochs);
  augment->add_option("--lr", fit.learning_rate);
  augment->add_option("--l2", fit.l2);
  augment->add_option("--seed", fit.seed);
  augment->add_option("--out", aug_out);

  // probe-faithfulness
  ExperimentFlags probe_flags;
  std::string probe_out;
  auto* probe = app.add_subcommand("probe-faithfulness",
                                   "Explain the same data against a normal and a label-reversed classifier");
  add_experiment_flags(probe, probe_flags);
  probe->add_option("--out", probe_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*make_corpus) {
      if (!spurious.empty()) corpus_cfg.spurious_token = spurious;
      const auto corpus = cfx::make_synthetic_corpus(corpus_cfg);
      std::filesystem::create_directories(corpus_dir);
      const std::filesystem::path dir(corpus_dir);
      cfx::write_documents_jsonl((dir / "train.jsonl").string(), corpus.train);
      cfx::write_documents_jsonl((dir / "test.jsonl").string(), corpus.test);
      cfx::write_documents_jsonl((dir / "ood.jsonl").string(), corpus.ood);
      cfx::write_lexicon_jsonl((dir / "lexicon.jsonl").string(), corpus.lexicon);
      json summary = {{"train", corpus.train.size()}, {"test", corpus.test.size()}, {"ood", corpus.ood.size()}};
      if (corpus.train_spurious_correlation) {
        summary["train_spurious_correlation"] = *corpus.train_spurious_correlation;
        summary["ood_spurious_correlation"] = *corpus.ood_spurious_correlation;
      }
      std::cout << summary.dump(2) << "\n";
    } else if (*train_cmd) {
      fit.feature_mode = feature_mode == "binary" ? cfx::FeatureMode::kBinary : cfx::FeatureMode::kCount;
      cfx::FitStats stats;
      const auto model = cfx::fit_logistic(cfx::read_documents_jsonl(train_path), fit, &stats);
      cfx::save_model(model_out, model);
      json summary = {{"initial_loss", stats.initial_loss},
                      {"final_loss", stats.final_loss},
                      {"features", model.num_features()},
                      {"classes", model.class_names()}};
      for (const auto& p : eval_paths) summary["accuracy"][p] = cfx::accuracy(model, cfx::read_documents_jsonl(p));
      std::cout << summary.dump(2) << "\n";
    } else if (*explain) {
      const auto report = cfx::run_experiment(resolve(explain_flags));
      print_summary(report);
      if (resolve(explain_flags).out_report.empty()) std::cout << cfx::report_to_json(report).dump(2) << "\n";
    } else if (*evaluate) {
      auto rows = cfx::read_records_jsonl(records_path);
      if (rows.empty()) throw std::invalid_argument("no records in '" + records_path + "'");
      std::optional<cfx::NGramScorer> scorer;
      if (!ngram_corpus.empty()) scorer.emplace(cfx::read_documents_jsonl(ngram_corpus), ngram_order, ngram_k);
      for (auto& row : rows) row.perplexity.reset();
      if (!judge_endpoint.empty()) {
        cfx::GeneratorConfig jc;
        jc.kind = cfx::GeneratorKind::kHttp;
        jc.endpoint = judge_endpoint;
        jc.model = judge_model;
        jc.api_key_env = judge_key_env;
        jc.temperature = 0.2;
        const auto judge = cfx::make_generator(jc);
        for (auto& row : rows) {
          try {
            row.quality = cfx::judge_quality(*judge, row.record.counterfactual_text);
          } catch (const cfx::JudgeError& e) {
            std::cerr << "warning: " << row.record.original.id << ": " << e.what() << "\n";
            row.quality.reset();
          }
        }
      }
      const auto report = cfx::build_report(std::move(rows), scorer ? &*scorer : nullptr);
      print_summary(report);
      emit(cfx::report_to_json(report), eval_out);
    } else if (*augment) {
      std::map<std::string, std::vector<cfx::Document>> sets;
      for (const auto& spec : named_evals) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--eval expects name=path, got '" + spec + "'");
        sets[spec.substr(0, eq)] = cfx::read_documents_jsonl(spec.substr(eq + 1));
      }
      std::vector<cfx::CounterfactualRecord> cfs;
      for (auto& row : cfx::read_records_jsonl(records_path)) cfs.push_back(std::move(row.record));
      const auto table = cfx::augment_and_retrain(cfx::read_documents_jsonl(train_path), cfs, sets, fit);
      if (table.no_flipped_counterfactuals) std::cerr << "warning: no flipped counterfactuals to add\n";
      emit(json{{"baseline", table.baseline}, {"augmented", table.augmented}, {"added", table.added}}, aug_out);
    } else if (*probe) {
      const auto cfg = resolve(probe_flags);
      if (cfg.train_path.empty()) throw std::invalid_argument("probe-faithfulness needs --train");
      cfg.explain.validate();
      const auto train = cfx::read_documents_jsonl(cfg.train_path);
      const auto test = cfx::read_documents_jsonl(cfg.data_path);
      const auto generator = cfx::make_generator(cfg.generator);
      const auto shots = cfg.exemplars_path.empty() ? cfx::builtin_shots(cfg.explain.task)
                                                    : cfx::read_shots_jsonl(cfg.exemplars_path);
      const cfx::NGramScorer scorer(cfg.ngram_corpus_path.empty() ? train : cfx::read_documents_jsonl(cfg.ngram_corpus_path),
                                    cfg.ngram_order, cfg.ngram_k);
      const auto result = cfx::probe_faithfulness(cfg.explain, cfg.fit, train, test, *generator, shots, &scorer);
      emit(cfx::probe_to_json(result), probe_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
