#pragma once

#include <string>
#include <vector>

#include "cfx/classifier.hpp"

namespace cfx {

struct ImportantWords {
  std::vector<std::string> words;  // most important first
  bool empty_attribution = false;
};

/// Top ceil(fraction * distinct words) words by score. Words are
/// deduplicated case-insensitively keeping the maximal score; equal scores
/// resolve to the earliest position. `fraction` must lie in (0, 1].
ImportantWords select_important_words(const Attribution& attr, double fraction = 0.25);

}  // namespace cfx
