#include "cfx/augmentation.hpp"

#include <set>
#include <stdexcept>
#include <future>

namespace cfx {

LabelMapping binary_swap(const std::string& a, const std::string& b) {
  if (a == b) throw std::invalid_argument("binary_swap: labels must differ");
  return {{a, b}, {b, a}};
}

std::vector<Document> reverse_labels(const std::vector<Document>& data, const LabelMapping& mapping) {
  std::set<std::string> keys;
  std::set<std::string> values;
  for (const auto& [k, v] : mapping) {
    keys.insert(k);
    values.insert(v);
  }
  if (keys != values) throw std::invalid_argument("reverse_labels: mapping is not a permutation");
  if (mapping.size() == 2) {
    for (const auto& [k, v] : mapping) {
      if (k == v) throw std::invalid_argument("reverse_labels: binary mapping has a fixed point");
    }
  }

  std::vector<Document> out = data;
  for (auto& d : out) {
    if (!d.label) throw std::invalid_argument("reverse_labels: document '" + d.id + "' has no label");
    const auto it = mapping.find(*d.label);
    if (it == mapping.end()) throw std::invalid_argument("reverse_labels: label '" + *d.label + "' outside mapping");
    d.label = it->second;
  }
  return out;
}

std::vector<Document> augmented_training_set(const std::vector<Document>& train,
                                             const std::vector<CounterfactualRecord>& cfs) {
  std::vector<Document> out = train;
  for (const auto& r : cfs) {
    if (!r.flipped) continue;
    if (r.target_label.empty()) throw std::invalid_argument("augment: record '" + r.original.id + "' lacks a target");
    Document d;
    d.id = r.original.id + "#cf";
    d.text = r.counterfactual_text;
    d.text_pair = r.original.text_pair;
    d.label = r.target_label;
    out.push_back(std::move(d));
  }
  return out;
}

AccuracyTable augment_and_retrain(const std::vector<Document>& train, const std::vector<CounterfactualRecord>& cfs,
                                  const std::map<std::string, std::vector<Document>>& eval_sets,
                                  const FitConfig& config) {
  for (const auto& [name, set] : eval_sets) {
    if (set.empty()) throw std::invalid_argument("augment: evaluation set '" + name + "' is empty");
  }
  AccuracyTable table;
  const auto augmented = augmented_training_set(train, cfs);
  table.added = augmented.size() - train.size();
  table.no_flipped_counterfactuals = table.added == 0;

  // The augmented run sees exactly the baseline data when nothing was added,
  // so both columns are produced either way.
  auto aug_future = std::async(std::launch::async, [&] { return fit_logistic(augmented, config); });
  const LinearModel base = fit_logistic(train, config);
  const LinearModel aug = aug_future.get();
  for (const auto& [name, set] : eval_sets) {
    table.baseline[name] = accuracy(base, set);
    table.augmented[name] = accuracy(aug, set);
  }
  return table;
}

}  // namespace cfx
