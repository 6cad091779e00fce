#include "cfx/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>

#include "cfx/attribution.hpp"
#include "cfx/augmentation.hpp"
#include "cfx/config.hpp"
#include "cfx/dataset_io.hpp"
#include "cfx/parallel.hpp"
#include "cfx/remote_classifier.hpp"

namespace cfx {

std::string_view attribution_name(AttributionMethod m) {
  return m == AttributionMethod::kSaliency ? "saliency" : "shap";
}

AttributionMethod parse_attribution(std::string_view name) {
  if (name == "saliency") return AttributionMethod::kSaliency;
  if (name == "shap") return AttributionMethod::kShap;
  throw std::invalid_argument("unknown attribution method '" + std::string(name) + "'");
}

void ExplainSettings::validate() const {
  if (uses_validation(method) && n < 2) throw std::invalid_argument("cgv/cggv need n >= 2 candidates");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (shots < 1) throw std::invalid_argument("at least one shot is required");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must be in (0, 1]");
  if (max_parallel < 1) throw std::invalid_argument("parallelism must be >= 1");
}

std::string choose_target_label(const std::vector<std::string>& classes, const std::string& predicted,
                                const std::optional<std::string>& override_label) {
  const auto it = std::find(classes.begin(), classes.end(), predicted);
  if (it == classes.end()) throw std::invalid_argument("predicted label '" + predicted + "' not in class set");
  if (classes.size() > 2 && override_label && *override_label != predicted) {
    if (std::find(classes.begin(), classes.end(), *override_label) == classes.end()) {
      throw std::invalid_argument("target label '" + *override_label + "' not in class set");
    }
    return *override_label;
  }
  const auto idx = static_cast<std::size_t>(it - classes.begin());
  return classes[(idx + 1) % classes.size()];
}

PreparedQuery prepare_query(const ExplainSettings& settings, const ExplainContext& ctx, const Document& doc) {
  if (ctx.shots.size() < settings.shots) {
    throw std::invalid_argument("requested " + std::to_string(settings.shots) + " shots but only " +
                                std::to_string(ctx.shots.size()) + " exemplars are available");
  }
  Document query = doc;
  query.label.reset();

  PreparedQuery q;
  q.predicted_label = ctx.classifier->predict(query).label;
  const auto& classes = ctx.classifier->class_names();

  if (ctx.attribution_model) {
    Attribution attr;
    if (settings.attribution == AttributionMethod::kShap) {
      if (!ctx.background || ctx.background->empty()) throw std::invalid_argument("SHAP needs a background set");
      attr = linear_shap(*ctx.attribution_model, query, *ctx.background);
    } else {
      attr = gradient_saliency(*ctx.attribution_model, query);
    }
    q.important_words = select_important_words(attr, settings.fraction).words;
  } else if (uses_guidance(settings.method)) {
    throw std::invalid_argument("guided methods need a local attribution model");
  }

  auto& spec = q.spec;
  spec.task = settings.task;
  spec.mode = uses_guidance(settings.method) ? PromptMode::kCgg : PromptMode::kVanilla;
  spec.shots.assign(ctx.shots.begin(), ctx.shots.begin() + static_cast<std::ptrdiff_t>(settings.shots));
  spec.query = std::move(query);
  spec.source_label = q.predicted_label;
  spec.target_label = choose_target_label(classes, q.predicted_label, settings.target_label);
  spec.class_names = classes;
  if (spec.mode == PromptMode::kCgg) {
    spec.important_words = *q.important_words;
    spec.empty_guidance = spec.important_words.empty();
  }
  return q;
}

ReportRow explain_document(const ExplainSettings& settings, const ExplainContext& ctx, const Document& doc) {
  auto q = prepare_query(settings, ctx, doc);
  const std::size_t n = uses_validation(settings.method) ? settings.n : 1;
  const auto doc_seed = mix_seed(settings.seed, hash_string(doc.id));
  const auto cands = sample_candidates(*ctx.generator, *ctx.classifier, q.spec, n, doc_seed, ctx.candidate_parallel);
  for (const auto& f : cands.failures) {
    std::cerr << "warning: " << doc.id << " candidate " << f.index << " failed: " << f.error << "\n";
  }

  ReportRow row;
  row.record = select_counterfactual(cands);
  row.record.original = doc;
  row.record.original_label = q.predicted_label;
  row.record.method = settings.method;
  row.record.important_words = q.important_words;
  if (ctx.judge) {
    try {
      row.quality = judge_quality(*ctx.judge, row.record.counterfactual_text);
    } catch (const JudgeError& e) {
      std::cerr << "warning: " << doc.id << " quality judge failed: " << e.what() << "\n";
    }
  }
  return row;
}

EvaluationReport explain_corpus(const ExplainSettings& settings, const ExplainContext& ctx,
                                const std::vector<Document>& docs) {
  settings.validate();
  if (!ctx.classifier || !ctx.generator) throw std::invalid_argument("explain: classifier and generator are required");
  if (docs.empty()) throw std::invalid_argument("explain: no documents");

  std::vector<std::optional<ReportRow>> rows(docs.size());
  std::vector<std::string> errors(docs.size());
  parallel_for(docs.size(), settings.max_parallel, [&](std::size_t i) {
    try {
      rows[i] = explain_document(settings, ctx, docs[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<ReportRow> ok;
  std::vector<DocumentFailure> failures;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (rows[i]) {
      ok.push_back(std::move(*rows[i]));
    } else {
      failures.push_back({docs[i].id, errors[i]});
    }
  }
  if (ok.empty()) throw std::runtime_error("explain: every document failed; first error: " + errors.front());
  return build_report(std::move(ok), ctx.scorer, std::move(failures));
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config '" + key + "': expected a number, got '" + v + "'");
  }
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto& e = explain;
  if (key == "task") e.task = parse_task(value);
  else if (key == "method") e.method = parse_method(value);
  else if (key == "n") e.n = parse_u64(key, value);
  else if (key == "shots") e.shots = parse_u64(key, value);
  else if (key == "fraction") e.fraction = parse_double(key, value);
  else if (key == "attribution") e.attribution = parse_attribution(value);
  else if (key == "seed") e.seed = fit.seed = generator.seed = parse_u64(key, value);
  else if (key == "parallel") e.max_parallel = parse_u64(key, value);
  else if (key == "target_label") e.target_label = value;
  else if (key == "data") data_path = value;
  else if (key == "model") model_path = value;
  else if (key == "train") train_path = value;
  else if (key == "remote") remote_endpoint = value;
  else if (key == "epochs") fit.epochs = static_cast<int>(parse_u64(key, value));
  else if (key == "learning_rate") fit.learning_rate = parse_double(key, value);
  else if (key == "l2") fit.l2 = parse_double(key, value);
  else if (key == "generator") {
    if (value == "mock") generator.kind = GeneratorKind::kMock;
    else if (value == "http") generator.kind = GeneratorKind::kHttp;
    else throw std::invalid_argument("config 'generator': expected mock or http");
  }
  else if (key == "endpoint") generator.endpoint = value;
  else if (key == "llm_model") generator.model = value;
  else if (key == "api_key_env") generator.api_key_env = value;
  else if (key == "lexicon") generator.lexicon_path = value;
  else if (key == "flip_prob") generator.flip_probability = parse_double(key, value);
  else if (key == "temperature") generator.temperature = parse_double(key, value);
  else if (key == "timeout_ms") generator.timeout = std::chrono::milliseconds(parse_u64(key, value));
  else if (key == "generator_parallel") generator.max_parallel = static_cast<int>(parse_u64(key, value));
  else if (key == "generator_retries") generator.retries = static_cast<int>(parse_u64(key, value));
  else if (key == "exemplars") exemplars_path = value;
  else if (key == "background") background_path = value;
  else if (key == "ngram_corpus") ngram_corpus_path = value;
  else if (key == "ngram_order") ngram_order = parse_u64(key, value);
  else if (key == "ngram_k") ngram_k = parse_double(key, value);
  else if (key == "judge_endpoint") {
    if (!judge) {
      judge = GeneratorConfig{};
      judge->kind = GeneratorKind::kHttp;
      judge->temperature = 0.2;
    }
    judge->endpoint = value;
  } else if (key == "judge_model") {
    if (!judge) throw std::invalid_argument("config 'judge_model' needs judge_endpoint first");
    judge->model = value;
  }
  else if (key == "out_records") out_records = value;
  else if (key == "out_report") out_report = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
  explain.validate();
  generator.validate();
  if (data_path.empty()) throw std::invalid_argument("config: 'data' is required");
  const int sources = !model_path.empty() + !train_path.empty() + !remote_endpoint.empty();
  if (sources != 1) throw std::invalid_argument("config: set exactly one of 'model', 'train', 'remote'");
  if (!remote_endpoint.empty() && uses_guidance(explain.method)) {
    throw std::invalid_argument("config: cgg/cggv need a local model for attribution");
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : read_key_values(path)) cfg.set(k, v);
  return cfg;
}

EvaluationReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto docs = read_documents_jsonl(config.data_path);

  std::vector<Document> train;
  if (!config.train_path.empty()) train = read_documents_jsonl(config.train_path);

  std::unique_ptr<LinearModel> local;
  std::unique_ptr<RemoteClassifier> remote;
  if (!config.model_path.empty()) {
    local = std::make_unique<LinearModel>(load_model(config.model_path));
  } else if (!config.train_path.empty()) {
    local = std::make_unique<LinearModel>(fit_logistic(train, config.fit));
  } else {
    RemoteClassifierConfig rc;
    rc.endpoint = config.remote_endpoint;
    rc.max_in_flight = static_cast<int>(config.explain.max_parallel);
    remote = std::make_unique<RemoteClassifier>(rc);
  }

  std::vector<Document> background;
  if (!config.background_path.empty()) {
    background = read_documents_jsonl(config.background_path);
  } else {
    background = train.empty() ? docs : train;
  }

  const auto generator = make_generator(config.generator);
  std::unique_ptr<Generator> judge;
  if (config.judge) judge = make_generator(*config.judge);

  const auto ngram_docs =
      config.ngram_corpus_path.empty() ? (train.empty() ? docs : train) : read_documents_jsonl(config.ngram_corpus_path);
  const NGramScorer scorer(ngram_docs, config.ngram_order, config.ngram_k);

  ExplainContext ctx;
  ctx.classifier = local ? static_cast<const Classifier*>(local.get()) : remote.get();
  ctx.attribution_model = local.get();
  ctx.background = &background;
  ctx.generator = generator.get();
  ctx.shots = config.exemplars_path.empty() ? builtin_shots(config.explain.task) : read_shots_jsonl(config.exemplars_path);
  ctx.scorer = &scorer;
  ctx.judge = judge.get();
  ctx.candidate_parallel = static_cast<std::size_t>(config.generator.max_parallel);

  auto report = explain_corpus(config.explain, ctx, docs);
  if (!config.out_records.empty()) write_records_jsonl(config.out_records, report);
  if (!config.out_report.empty()) write_json(config.out_report, report_to_json(report));
  return report;
}

// ---------------------------------------------------------------------------

ProbeResult probe_faithfulness(const ExplainSettings& settings, const FitConfig& fit,
                               const std::vector<Document>& train, const std::vector<Document>& test,
                               const Generator& generator, std::vector<Shot> shots, const LanguageScorer* scorer) {
  const LinearModel baseline = fit_logistic(train, fit);
  const auto& classes = baseline.class_names();
  if (classes.size() != 2) throw std::invalid_argument("probe_faithfulness: needs a binary task");
  const LinearModel reversed = fit_logistic(reverse_labels(train, binary_swap(classes[0], classes[1])), fit);

  ProbeResult result;
  result.baseline_test_accuracy = accuracy(baseline, test);
  result.reversed_test_accuracy = accuracy(reversed, test);

  ExplainContext ctx;
  ctx.generator = &generator;
  ctx.shots = std::move(shots);
  ctx.scorer = scorer;
  ctx.background = &train;

  ctx.classifier = &baseline;
  ctx.attribution_model = &baseline;
  result.baseline = explain_corpus(settings, ctx, test);

  ctx.classifier = &reversed;
  ctx.attribution_model = &reversed;
  result.reversed = explain_corpus(settings, ctx, test);
  return result;
}

nlohmann::json probe_to_json(const ProbeResult& probe) {
  auto summary = [](const EvaluationReport& r, double acc) {
    return nlohmann::json{{"test_accuracy", acc},
                          {"n", r.n},
                          {"flip_rate", r.flip_rate},
                          {"mean_distance", r.mean_distance},
                          {"mean_perplexity", r.mean_perplexity ? nlohmann::json(*r.mean_perplexity) : nullptr}};
  };
  nlohmann::json delta = {{"flip_rate", probe.reversed.flip_rate - probe.baseline.flip_rate},
                          {"mean_distance", probe.reversed.mean_distance - probe.baseline.mean_distance},
                          {"mean_perplexity", nullptr}};
  if (probe.baseline.mean_perplexity && probe.reversed.mean_perplexity) {
    delta["mean_perplexity"] = *probe.reversed.mean_perplexity - *probe.baseline.mean_perplexity;
  }
  return {{"baseline", summary(probe.baseline, probe.baseline_test_accuracy)},
          {"reversed", summary(probe.reversed, probe.reversed_test_accuracy)},
          {"delta", delta}};
}

}  // namespace cfx
