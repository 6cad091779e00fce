#include "cfx/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "cfx/text.hpp"

namespace cfx {

ImportantWords select_important_words(const Attribution& attr, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("select_important_words: fraction must be in (0, 1]");
  }
  ImportantWords out;
  if (attr.entries.empty()) {
    out.empty_attribution = true;
    return out;
  }

  struct Best {
    std::string surface;
    std::size_t position;
    double score;
  };
  std::vector<Best> best;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& e : attr.entries) {
    const auto key = to_lower(e.word);
    const auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, best.size());
      best.push_back({e.word, e.position, e.score});
      continue;
    }
    auto& b = best[it->second];
    if (e.score > b.score || (e.score == b.score && e.position < b.position)) {
      b = {e.word, e.position, e.score};
    }
  }

  std::sort(best.begin(), best.end(), [](const Best& a, const Best& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.position < b.position;
  });
  // Guard against 0.25 * 4 evaluating to 1.0000000000000002.
  const double raw = fraction * static_cast<double>(best.size());
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  k = std::clamp<std::size_t>(k, 1, best.size());
  for (std::size_t i = 0; i < k; ++i) out.words.push_back(best[i].surface);
  return out;
}

}  // namespace cfx
