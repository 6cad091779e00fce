#include "cfx/generation.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cfx/http.hpp"
#include "cfx/parallel.hpp"
#include "cfx/text.hpp"

namespace cfx {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio stride
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------

std::vector<LexiconEntry> read_lexicon_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon '" + path + "'");
  std::vector<LexiconEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LexiconEntry e;
      e.word = j.at("word").get<std::string>();
      e.antonym = j.at("antonym").get<std::string>();
      if (j.contains("label") && !j["label"].is_null()) e.label = j["label"].get<std::string>();
      if (j.contains("antonym_label") && !j["antonym_label"].is_null()) {
        e.antonym_label = j["antonym_label"].get<std::string>();
      }
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_lexicon_jsonl(const std::string& path, const std::vector<LexiconEntry>& lexicon) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write lexicon '" + path + "'");
  for (const auto& e : lexicon) {
    nlohmann::json j = {{"word", e.word}, {"antonym", e.antonym}};
    if (e.label) j["label"] = *e.label;
    if (e.antonym_label) j["antonym_label"] = *e.antonym_label;
    out << j.dump() << "\n";
  }
}

void GeneratorConfig::validate() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("generator: temperature must be >= 0");
  if (max_parallel < 1) throw std::invalid_argument("generator: max_parallel must be >= 1");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw std::invalid_argument("generator: flip probability must be in [0, 1]");
  }
  if (kind == GeneratorKind::kHttp && endpoint.empty()) throw std::invalid_argument("generator: http needs an endpoint");
}

// ---------------------------------------------------------------------------
// Mock

MockGenerator::MockGenerator(std::vector<LexiconEntry> lexicon, double flip_probability, std::uint64_t base_seed)
    : flip_probability_(flip_probability), base_seed_(base_seed) {
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw std::invalid_argument("MockGenerator: flip probability must be in [0, 1]");
  }
  auto lower_opt = [](const std::optional<std::string>& s) -> std::optional<std::string> {
    if (!s) return std::nullopt;
    return to_lower(*s);
  };
  for (const auto& e : lexicon) {
    swaps_.insert_or_assign(to_lower(e.word), Swap{to_lower(e.antonym), lower_opt(e.label)});
    swaps_.try_emplace(to_lower(e.antonym), Swap{to_lower(e.word), lower_opt(e.antonym_label)});
  }
}

std::string MockGenerator::rewrite(const std::string& text, const std::string& target_label,
                                   std::uint64_t seed) const {
  const auto target = to_lower(target_label);
  std::uint64_t state = seed;
  auto uniform = [&state] {
    state = mix_seed(state, 0);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };

  std::string out;
  std::size_t cursor = 0;
  for (const auto& tok : tokenize_with_spans(text)) {
    const auto it = swaps_.find(to_lower(tok.text));
    if (it == swaps_.end()) continue;
    const auto& swap = it->second;
    if (swap.label && !target.empty() && *swap.label == target) continue;
    if (!(uniform() < flip_probability_)) continue;
    std::string replacement = swap.antonym;
    if (std::isupper(static_cast<unsigned char>(tok.text.front())) && !replacement.empty()) {
      replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    }
    out.append(text, cursor, tok.begin - cursor);
    out += replacement;
    cursor = tok.end;
  }
  out.append(text, cursor, std::string::npos);
  return out;
}

std::string MockGenerator::generate(const std::string& prompt, std::optional<std::uint64_t> seed) const {
  const auto query = extract_query(prompt);
  const std::string text = query ? query->text : prompt;
  const std::string target = query ? query->target_label : std::string();
  const auto s = mix_seed(hash_string(prompt), seed.value_or(base_seed_));
  return "<new>" + rewrite(text, target, s) + "</new>";
}

// ---------------------------------------------------------------------------
// HTTP

HttpGenerator::HttpGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw GenerationError(GenerationError::Kind::kConfig,
                          "API key environment variable '" + cfg_.api_key_env + "' is not set");
  }
  api_key_ = key;
}

std::string HttpGenerator::generate(const std::string& prompt, std::optional<std::uint64_t> seed) const {
  nlohmann::json req = {
      {"model", cfg_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", cfg_.temperature},
  };
  if (seed) req["seed"] = *seed;
  std::string url = cfg_.endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  const std::map<std::string, std::string> headers = {{"Authorization", "Bearer " + api_key_}};
  HttpResult res;
  for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
    res = http_post_json(url, req.dump(), headers, cfg_.timeout);
    const bool retryable = res.transport_error || res.status == 429 || res.status >= 500;
    if (!retryable) break;
  }
  if (res.transport_error) {
    throw GenerationError(res.timed_out ? GenerationError::Kind::kTimeout : GenerationError::Kind::kHttp,
                          "generator request failed: " + res.error);
  }
  if (res.status != 200) {
    throw GenerationError(GenerationError::Kind::kHttp, "generator returned HTTP " + std::to_string(res.status));
  }
  std::string content;
  try {
    const auto j = nlohmann::json::parse(res.body);
    const auto& msg = j.at("choices").at(0).at("message");
    if (msg.contains("content") && msg["content"].is_string()) content = msg["content"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw GenerationError(GenerationError::Kind::kHttp, std::string("malformed completion: ") + e.what());
  }
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw GenerationError(GenerationError::Kind::kEmptyCompletion, "empty completion");
  }
  return content;
}

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg) {
  cfg.validate();
  if (cfg.kind == GeneratorKind::kHttp) return std::make_unique<HttpGenerator>(cfg);
  std::vector<LexiconEntry> lexicon;
  if (!cfg.lexicon_path.empty()) lexicon = read_lexicon_jsonl(cfg.lexicon_path);
  return std::make_unique<MockGenerator>(std::move(lexicon), cfg.flip_probability, cfg.seed);
}

// ---------------------------------------------------------------------------

CandidateSet sample_candidates(const Generator& generator, const Classifier& classifier, const PromptSpec& spec,
                               std::size_t n, std::uint64_t seed, std::size_t max_parallel) {
  if (n < 1) throw std::invalid_argument("sample_candidates: n must be >= 1");
  const std::string prompt = build_prompt(spec);
  const auto original_tokens = tokenize(spec.query.text);

  std::vector<std::optional<Candidate>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, max_parallel, [&](std::size_t i) {
    try {
      const auto parsed = parse_generation(generator.generate(prompt, mix_seed(seed, i)));
      Document doc = spec.query;
      doc.text = parsed.text;
      doc.label.reset();
      auto pred = classifier.predict(doc);
      Candidate c;
      c.index = i;
      c.text = parsed.text;
      c.tagged = parsed.tagged;
      c.predicted_label = std::move(pred.label);
      c.probs = std::move(pred.probs);
      c.distance = token_levenshtein(original_tokens, tokenize(parsed.text));
      slots[i] = std::move(c);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  CandidateSet set;
  set.original = spec.query;
  set.target_label = spec.target_label;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      set.candidates.push_back(std::move(*slots[i]));
    } else {
      set.failures.push_back({i, errors[i]});
    }
  }
  if (set.candidates.empty()) {
    throw GenerationError(GenerationError::Kind::kHttp, "all " + std::to_string(n) +
                                                            " generations failed; first error: " + errors[0]);
  }
  return set;
}

}  // namespace cfx
