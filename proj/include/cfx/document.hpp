#pragma once

#include <optional>
#include <string>

namespace cfx {

/// One classified text instance. For NLI-style tasks `text` is the premise
/// (the side counterfactual edits target) and `text_pair` the hypothesis.
struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> text_pair;
  std::optional<std::string> label;

  bool operator==(const Document&) const = default;
};

}  // namespace cfx
