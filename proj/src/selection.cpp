#include "cfx/selection.hpp"

#include <stdexcept>

namespace cfx {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kVanilla: return "vanilla";
    case Method::kCgg: return "cgg";
    case Method::kCgv: return "cgv";
    case Method::kCggv: return "cggv";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "vanilla") return Method::kVanilla;
  if (name == "cgg") return Method::kCgg;
  if (name == "cgv") return Method::kCgv;
  if (name == "cggv") return Method::kCggv;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool uses_guidance(Method m) { return m == Method::kCgg || m == Method::kCggv; }
bool uses_validation(Method m) { return m == Method::kCgv || m == Method::kCggv; }

CounterfactualRecord select_counterfactual(const CandidateSet& cands) {
  if (cands.candidates.empty()) throw std::invalid_argument("select_counterfactual: empty candidate set");

  auto better = [](const Candidate& c, const Candidate* best) {
    return !best || c.distance < best->distance || (c.distance == best->distance && c.index < best->index);
  };
  const Candidate* best_flipped = nullptr;
  const Candidate* best_any = nullptr;
  for (const auto& c : cands.candidates) {
    if (c.predicted_label == cands.target_label && better(c, best_flipped)) best_flipped = &c;
    if (better(c, best_any)) best_any = &c;
  }

  const Candidate& chosen = best_flipped ? *best_flipped : *best_any;
  CounterfactualRecord rec;
  rec.original = cands.original;
  rec.target_label = cands.target_label;
  rec.counterfactual_text = chosen.text;
  rec.flipped = best_flipped != nullptr;
  rec.distance = chosen.distance;
  rec.candidate_count_used = cands.candidates.size();
  rec.tagged = chosen.tagged;
  rec.candidate_index = chosen.index;
  return rec;
}

}  // namespace cfx
