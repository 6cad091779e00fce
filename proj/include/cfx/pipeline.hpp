#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfx/classifier.hpp"
#include "cfx/generation.hpp"
#include "cfx/metrics.hpp"
#include "cfx/prompt.hpp"
#include "cfx/selection.hpp"

namespace cfx {

enum class AttributionMethod { kSaliency, kShap };

std::string_view attribution_name(AttributionMethod m);
AttributionMethod parse_attribution(std::string_view name);

/// Per-run knobs of the explanation loop.
struct ExplainSettings {
  Task task = Task::kSentiment;
  Method method = Method::kVanilla;
  std::size_t n = 5;       // candidates for cgv / cggv
  std::size_t shots = 1;
  double fraction = 0.25;
  AttributionMethod attribution = AttributionMethod::kSaliency;
  std::uint64_t seed = 0;
  std::size_t max_parallel = 1;  // documents in flight
  std::optional<std::string> target_label;  // multiclass override

  void validate() const;
};

/// Shared, read-only components of a run. `attribution_model` may be null
/// (e.g. a remote classifier); guided methods then fail per document.
struct ExplainContext {
  const Classifier* classifier = nullptr;
  const LinearModel* attribution_model = nullptr;
  const std::vector<Document>* background = nullptr;  // required for SHAP
  const Generator* generator = nullptr;
  std::vector<Shot> shots;
  const LanguageScorer* scorer = nullptr;
  const Generator* judge = nullptr;
  std::size_t candidate_parallel = 1;
};

/// Counterfactual label for a prediction: the other class for binary
/// tasks; for multiclass the override when it differs from `predicted`,
/// otherwise the next class in declared order (wrapping).
std::string choose_target_label(const std::vector<std::string>& classes, const std::string& predicted,
                                const std::optional<std::string>& override_label);

/// Prompt for one document, the classifier's prediction and the important
/// words used (recorded whenever an attribution model is available, even
/// when the prompt carries no guidance).
struct PreparedQuery {
  PromptSpec spec;
  std::string predicted_label;
  std::optional<std::vector<std::string>> important_words;
};
PreparedQuery prepare_query(const ExplainSettings& settings, const ExplainContext& ctx, const Document& doc);

/// Explains one document end to end. Throws on failure.
ReportRow explain_document(const ExplainSettings& settings, const ExplainContext& ctx, const Document& doc);

/// Explains every document; failures are recorded per document. Throws when
/// every document failed.
EvaluationReport explain_corpus(const ExplainSettings& settings, const ExplainContext& ctx,
                                const std::vector<Document>& docs);

/// File-level experiment description (config file / CLI flags).
struct ExperimentConfig {
  ExplainSettings explain;
  std::string data_path;
  // classifier: exactly one of model_path, train_path, remote_endpoint
  std::string model_path;
  std::string train_path;
  std::string remote_endpoint;
  FitConfig fit;
  GeneratorConfig generator;
  std::string exemplars_path;  // empty: built-in shots
  std::string background_path;  // SHAP background; defaults to the train/data set
  std::string ngram_corpus_path;  // empty: use the explained documents
  std::size_t ngram_order = 3;
  double ngram_k = 0.1;
  std::optional<GeneratorConfig> judge;
  std::string out_records;
  std::string out_report;

  /// Applies one `key = value` setting; std::invalid_argument for unknown keys.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

/// Loads every component named by the config, explains the data set and
/// writes the records / report files when paths are set.
EvaluationReport run_experiment(const ExperimentConfig& config);

struct ProbeResult {
  EvaluationReport baseline;
  EvaluationReport reversed;
  double baseline_test_accuracy = 0.0;
  double reversed_test_accuracy = 0.0;
};

/// Runs the same explanation settings against a classifier trained on
/// `train` and one trained on label-swapped `train`; accuracies are
/// measured on the unmodified `test` set, which is also the explained set.
ProbeResult probe_faithfulness(const ExplainSettings& settings, const FitConfig& fit,
                               const std::vector<Document>& train, const std::vector<Document>& test,
                               const Generator& generator, std::vector<Shot> shots, const LanguageScorer* scorer);

nlohmann::json probe_to_json(const ProbeResult& probe);

}  // namespace cfx
