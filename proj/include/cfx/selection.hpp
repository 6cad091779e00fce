#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/document.hpp"
#include "cfx/generation.hpp"

namespace cfx {

enum class Method { kVanilla, kCgg, kCgv, kCggv };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
bool uses_guidance(Method m);    // cgg, cggv
bool uses_validation(Method m);  // cgv, cggv

struct CounterfactualRecord {
  Document original;
  std::string original_label;
  std::string target_label;
  std::string counterfactual_text;
  bool flipped = false;
  std::size_t distance = 0;
  Method method = Method::kVanilla;
  std::optional<std::vector<std::string>> important_words;
  std::size_t candidate_count_used = 0;
  bool tagged = true;
  std::size_t candidate_index = 0;
};

/// Among candidates predicted as the target label, the one with minimal
/// distance; when none is, the minimal-distance candidate overall. Ties go
/// to the lowest candidate index. Fills the record's text, flip and
/// distance fields; the caller completes labels and method.
CounterfactualRecord select_counterfactual(const CandidateSet& cands);

}  // namespace cfx
