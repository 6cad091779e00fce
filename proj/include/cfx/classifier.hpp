#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfx/document.hpp"

namespace cfx {

enum class FeatureMode { kBinary, kCount };

struct Prediction {
  std::string label;
  std::vector<double> probs;  // aligned with the classifier's class_names()
};

/// Anything that maps a document to a label distribution.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual const std::vector<std::string>& class_names() const = 0;
  virtual Prediction predict(const Document& doc) const = 0;
};

/// Sparse feature vector: (feature index, value), sorted by index.
using SparseFeatures = std::vector<std::pair<std::size_t, double>>;

/// Multiclass bag-of-words logistic regression. Premise tokens map to
/// their lowercased form; hypothesis tokens are keyed with a "h:" prefix,
/// which cannot collide since ':' is always split off by the tokenizer.
class LinearModel final : public Classifier {
 public:
  LinearModel() = default;
  /// Zero-initialized model over the given vocabulary (word -> dense index).
  LinearModel(std::map<std::string, std::size_t> vocabulary, std::vector<std::string> class_names,
              FeatureMode mode = FeatureMode::kBinary);

  const std::vector<std::string>& class_names() const override { return class_names_; }
  Prediction predict(const Document& doc) const override;

  std::size_t num_classes() const { return class_names_.size(); }
  std::size_t num_features() const { return vocabulary_.size(); }
  FeatureMode feature_mode() const { return mode_; }
  const std::map<std::string, std::size_t>& vocabulary() const { return vocabulary_; }

  double weight(std::size_t cls, std::size_t feature) const { return weights_[cls * num_features() + feature]; }
  double& weight(std::size_t cls, std::size_t feature) { return weights_[cls * num_features() + feature]; }
  double bias(std::size_t cls) const { return bias_[cls]; }
  double& bias(std::size_t cls) { return bias_[cls]; }

  std::size_t class_index(const std::string& name) const;  // throws std::out_of_range
  /// Feature index for a single premise token, or -1 when out of vocabulary.
  std::ptrdiff_t feature_of(const std::string& token) const;

  SparseFeatures featurize(const Document& doc) const;
  std::vector<double> dense_features(const Document& doc) const;

  /// Class scores (logits) on a dense feature vector.
  std::vector<double> scores(const std::vector<double>& x) const;
  std::vector<double> scores(const SparseFeatures& x) const;
  /// d score_cls / d x, evaluated at x.
  std::vector<double> score_gradient(const std::vector<double>& x, std::size_t cls) const;

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;

 private:
  std::map<std::string, std::size_t> vocabulary_;
  std::vector<std::string> class_names_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  FeatureMode mode_ = FeatureMode::kBinary;
};

std::vector<double> softmax(const std::vector<double>& scores);
/// Index of the maximal value; ties resolve to the lowest index.
std::size_t argmax(const std::vector<double>& v);

struct FitConfig {
  int epochs = 1000;
  double learning_rate = 0.5;
  double l2 = 0.0;
  /// Full-batch descent is order-independent; the seed is carried so
  /// seed-matched runs can be compared and recorded.
  std::uint64_t seed = 0;
  FeatureMode feature_mode = FeatureMode::kBinary;
};

struct FitStats {
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Full-batch gradient descent on mean softmax cross-entropy plus
/// (l2 / 2) * ||W||^2. Weights start at zero. Class names are the sorted
/// distinct labels; vocabulary is every word token seen in training.
LinearModel fit_logistic(const std::vector<Document>& train, const FitConfig& config,
                         FitStats* stats = nullptr);

double mean_cross_entropy(const LinearModel& model, const std::vector<Document>& docs);
double accuracy(const Classifier& model, const std::vector<Document>& docs);

struct AttributionEntry {
  std::string word;  // surface form at `position`
  std::size_t position = 0;  // token index in the document text
  double score = 0.0;
};

struct Attribution {
  std::vector<AttributionEntry> entries;
  std::string predicted_class;
  bool no_vocabulary_words = false;
};

/// |d score_yhat / d x_j| for each in-vocabulary premise token.
Attribution gradient_saliency(const LinearModel& model, const Document& doc);

/// Shapley values phi_j = w_{yhat,j} * (x_j - mu_j) over all features, for
/// the predicted class, with mu the background feature mean.
std::vector<double> linear_shap_values(const LinearModel& model, const Document& doc,
                                       const std::vector<Document>& background);
/// Per-occurrence |phi_j| for in-vocabulary premise tokens.
Attribution linear_shap(const LinearModel& model, const Document& doc, const std::vector<Document>& background);

}  // namespace cfx
