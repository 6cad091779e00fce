#include "cfx/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cfx/text.hpp"

namespace cfx {
namespace {

constexpr const char* kPairPrefix = "h:";

std::vector<std::string> feature_keys(const Document& doc) {
  std::vector<std::string> keys;
  for (const auto& tok : tokenize(doc.text)) {
    if (is_word_token(tok)) keys.push_back(to_lower(tok));
  }
  if (doc.text_pair) {
    for (const auto& tok : tokenize(*doc.text_pair)) {
      if (is_word_token(tok)) keys.push_back(kPairPrefix + to_lower(tok));
    }
  }
  return keys;
}

}  // namespace

LinearModel::LinearModel(std::map<std::string, std::size_t> vocabulary, std::vector<std::string> class_names,
                         FeatureMode mode)
    : vocabulary_(std::move(vocabulary)),
      class_names_(std::move(class_names)),
      weights_(class_names_.size() * vocabulary_.size(), 0.0),
      bias_(class_names_.size(), 0.0),
      mode_(mode) {
  validate();
}

void LinearModel::validate() const {
  if (class_names_.size() < 2) throw std::invalid_argument("LinearModel: need at least 2 classes");
  std::set<std::string> distinct(class_names_.begin(), class_names_.end());
  if (distinct.size() != class_names_.size()) throw std::invalid_argument("LinearModel: duplicate class names");
  std::vector<bool> seen(vocabulary_.size(), false);
  for (const auto& [word, idx] : vocabulary_) {
    if (idx >= vocabulary_.size() || seen[idx]) {
      throw std::invalid_argument("LinearModel: vocabulary indices must be dense and unique");
    }
    seen[idx] = true;
  }
  if (weights_.size() != class_names_.size() * vocabulary_.size() || bias_.size() != class_names_.size()) {
    throw std::invalid_argument("LinearModel: parameter shape mismatch");
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("LinearModel: non-finite weight");
  }
  for (double b : bias_) {
    if (!std::isfinite(b)) throw std::invalid_argument("LinearModel: non-finite bias");
  }
}

std::size_t LinearModel::class_index(const std::string& name) const {
  const auto it = std::find(class_names_.begin(), class_names_.end(), name);
  if (it == class_names_.end()) throw std::out_of_range("unknown class '" + name + "'");
  return static_cast<std::size_t>(it - class_names_.begin());
}

std::ptrdiff_t LinearModel::feature_of(const std::string& token) const {
  const auto it = vocabulary_.find(to_lower(token));
  return it == vocabulary_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

SparseFeatures LinearModel::featurize(const Document& doc) const {
  std::map<std::size_t, double> acc;
  for (const auto& key : feature_keys(doc)) {
    const auto it = vocabulary_.find(key);
    if (it == vocabulary_.end()) continue;
    if (mode_ == FeatureMode::kBinary) {
      acc[it->second] = 1.0;
    } else {
      acc[it->second] += 1.0;
    }
  }
  return {acc.begin(), acc.end()};
}

std::vector<double> LinearModel::dense_features(const Document& doc) const {
  std::vector<double> x(num_features(), 0.0);
  for (const auto& [j, v] : featurize(doc)) x[j] = v;
  return x;
}

std::vector<double> LinearModel::scores(const std::vector<double>& x) const {
  if (x.size() != num_features()) throw std::invalid_argument("scores: feature vector size mismatch");
  std::vector<double> s(bias_);
  for (std::size_t c = 0; c < num_classes(); ++c) {
    for (std::size_t j = 0; j < x.size(); ++j) s[c] += weight(c, j) * x[j];
  }
  return s;
}

std::vector<double> LinearModel::scores(const SparseFeatures& x) const {
  std::vector<double> s(bias_);
  for (std::size_t c = 0; c < num_classes(); ++c) {
    for (const auto& [j, v] : x) s[c] += weight(c, j) * v;
  }
  return s;
}

std::vector<double> LinearModel::score_gradient(const std::vector<double>& x, std::size_t cls) const {
  if (x.size() != num_features()) throw std::invalid_argument("score_gradient: feature vector size mismatch");
  if (cls >= num_classes()) throw std::out_of_range("score_gradient: class index");
  // score_c(x) = b_c + sum_j W[c][j] x_j, so the partial in x_j is W[c][j]
  // independent of x.
  std::vector<double> g(num_features());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = weight(cls, j);
  return g;
}

Prediction LinearModel::predict(const Document& doc) const {
  auto probs = softmax(scores(featurize(doc)));
  return {class_names_[argmax(probs)], std::move(probs)};
}

std::vector<double> softmax(const std::vector<double>& scores) {
  if (scores.empty()) return {};
  const double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp(scores[i] - mx);
    z += p[i];
  }
  for (auto& v : p) v /= z;
  return p;
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

namespace {

struct Prepared {
  std::vector<SparseFeatures> features;
  std::vector<std::size_t> labels;
};

Prepared prepare(const LinearModel& model, const std::vector<Document>& docs) {
  Prepared p;
  p.features.reserve(docs.size());
  p.labels.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) throw std::invalid_argument("document '" + d.id + "' has no label");
    p.features.push_back(model.featurize(d));
    p.labels.push_back(model.class_index(*d.label));
  }
  return p;
}

double cross_entropy(const LinearModel& model, const Prepared& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    const auto s = model.scores(data.features[i]);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - mx);
    total += (mx + std::log(z)) - s[data.labels[i]];
  }
  return total / static_cast<double>(data.features.size());
}

}  // namespace

LinearModel fit_logistic(const std::vector<Document>& train, const FitConfig& config, FitStats* stats) {
  if (train.empty()) throw std::invalid_argument("fit_logistic: empty training set");
  std::set<std::string> labels;
  std::set<std::string> words;
  for (const auto& d : train) {
    if (!d.label) throw std::invalid_argument("fit_logistic: document '" + d.id + "' has no label");
    labels.insert(*d.label);
    for (auto& k : feature_keys(d)) words.insert(std::move(k));
  }
  if (labels.size() < 2) throw std::invalid_argument("fit_logistic: need at least 2 distinct labels");
  if (words.empty()) throw std::invalid_argument("fit_logistic: empty vocabulary after tokenization");
  if (config.epochs < 0 || !(config.learning_rate > 0.0) || config.l2 < 0.0) {
    throw std::invalid_argument("fit_logistic: invalid configuration");
  }

  std::map<std::string, std::size_t> vocab;
  for (const auto& w : words) vocab.emplace(w, vocab.size());
  LinearModel model(std::move(vocab), {labels.begin(), labels.end()}, config.feature_mode);

  const Prepared data = prepare(model, train);
  const std::size_t C = model.num_classes();
  const std::size_t F = model.num_features();
  const double inv_n = 1.0 / static_cast<double>(train.size());
  if (stats) stats->initial_loss = cross_entropy(model, data);

  std::vector<double> grad_w(C * F);
  std::vector<double> grad_b(C);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (std::size_t i = 0; i < data.features.size(); ++i) {
      const auto p = softmax(model.scores(data.features[i]));
      for (std::size_t c = 0; c < C; ++c) {
        const double err = (p[c] - (c == data.labels[i] ? 1.0 : 0.0)) * inv_n;
        grad_b[c] += err;
        for (const auto& [j, v] : data.features[i]) grad_w[c * F + j] += err * v;
      }
    }
    for (std::size_t c = 0; c < C; ++c) {
      model.bias(c) -= config.learning_rate * grad_b[c];
      for (std::size_t j = 0; j < F; ++j) {
        double& w = model.weight(c, j);
        w -= config.learning_rate * (grad_w[c * F + j] + config.l2 * w);
      }
    }
  }
  model.validate();
  if (stats) stats->final_loss = cross_entropy(model, data);
  return model;
}

double mean_cross_entropy(const LinearModel& model, const std::vector<Document>& docs) {
  if (docs.empty()) throw std::invalid_argument("mean_cross_entropy: empty document list");
  return cross_entropy(model, prepare(model, docs));
}

double accuracy(const Classifier& model, const std::vector<Document>& docs) {
  if (docs.empty()) throw std::invalid_argument("accuracy: empty document list");
  std::size_t correct = 0;
  for (const auto& d : docs) {
    if (!d.label) throw std::invalid_argument("accuracy: document '" + d.id + "' has no label");
    if (model.predict(d).label == *d.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(docs.size());
}

// ---------------------------------------------------------------------------
// Attribution

namespace {

Attribution per_token_attribution(const LinearModel& model, const Document& doc,
                                  const std::vector<double>& feature_scores, std::size_t predicted) {
  Attribution attr;
  attr.predicted_class = model.class_names()[predicted];
  const auto tokens = tokenize(doc.text);
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    if (!is_word_token(tokens[pos])) continue;
    const auto j = model.feature_of(tokens[pos]);
    if (j < 0) continue;
    attr.entries.push_back({tokens[pos], pos, std::abs(feature_scores[static_cast<std::size_t>(j)])});
  }
  attr.no_vocabulary_words = attr.entries.empty();
  return attr;
}

}  // namespace

Attribution gradient_saliency(const LinearModel& model, const Document& doc) {
  const auto x = model.dense_features(doc);
  const std::size_t predicted = argmax(model.scores(x));
  return per_token_attribution(model, doc, model.score_gradient(x, predicted), predicted);
}

std::vector<double> linear_shap_values(const LinearModel& model, const Document& doc,
                                       const std::vector<Document>& background) {
  if (background.empty()) throw std::invalid_argument("linear_shap: empty background");
  std::vector<double> mu(model.num_features(), 0.0);
  for (const auto& b : background) {
    for (const auto& [j, v] : model.featurize(b)) mu[j] += v;
  }
  for (auto& m : mu) m /= static_cast<double>(background.size());

  const auto x = model.dense_features(doc);
  const std::size_t predicted = argmax(model.scores(x));
  std::vector<double> phi(model.num_features());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = model.weight(predicted, j) * (x[j] - mu[j]);
  return phi;
}

Attribution linear_shap(const LinearModel& model, const Document& doc, const std::vector<Document>& background) {
  const auto phi = linear_shap_values(model, doc, background);
  const std::size_t predicted = argmax(model.scores(model.featurize(doc)));
  return per_token_attribution(model, doc, phi, predicted);
}

}  // namespace cfx
