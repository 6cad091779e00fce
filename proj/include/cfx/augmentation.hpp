#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfx/classifier.hpp"
#include "cfx/selection.hpp"

namespace cfx {

using LabelMapping = std::map<std::string, std::string>;

/// Swaps the two labels of a binary label set.
LabelMapping binary_swap(const std::string& a, const std::string& b);

/// Copy of `data` with every label replaced through `mapping`, which must
/// be a permutation of its keys; fixed points are rejected for two-label
/// mappings. std::invalid_argument on an unmapped or missing label.
std::vector<Document> reverse_labels(const std::vector<Document>& data, const LabelMapping& mapping);

struct AccuracyTable {
  std::map<std::string, double> baseline;
  std::map<std::string, double> augmented;
  std::size_t added = 0;  // flipped counterfactuals appended to the training set
  bool no_flipped_counterfactuals = false;
};

/// Training set extended with (counterfactual_text, target_label) for every
/// flipped record. The input list is left untouched.
std::vector<Document> augmented_training_set(const std::vector<Document>& train,
                                             const std::vector<CounterfactualRecord>& cfs);

/// Trains a baseline on `train` and a seed-matched model on the augmented
/// set, then reports accuracy of both on every evaluation set. With no
/// flipped records both runs see the same data and the flag is set.
AccuracyTable augment_and_retrain(const std::vector<Document>& train, const std::vector<CounterfactualRecord>& cfs,
                                  const std::map<std::string, std::vector<Document>>& eval_sets,
                                  const FitConfig& config);

}  // namespace cfx
