#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfx/classifier.hpp"
#include "cfx/prompt.hpp"

namespace cfx {

class GenerationError : public std::runtime_error {
 public:
  enum class Kind { kTimeout, kHttp, kEmptyCompletion, kConfig };
  GenerationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Antonym pair. `label` / `antonym_label` optionally name the class each
/// side expresses; the mock uses them as its world knowledge.
struct LexiconEntry {
  std::string word;
  std::string antonym;
  std::optional<std::string> label;
  std::optional<std::string> antonym_label;
};

std::vector<LexiconEntry> read_lexicon_jsonl(const std::string& path);
void write_lexicon_jsonl(const std::string& path, const std::vector<LexiconEntry>& lexicon);

enum class GeneratorKind { kHttp, kMock };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kMock;
  // http
  std::string endpoint;
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  int retries = 0;
  // mock
  std::string lexicon_path;
  double flip_probability = 1.0;
  std::uint64_t seed = 0;

  double temperature = 1.0;
  std::chrono::milliseconds timeout{60000};
  int max_parallel = 1;

  void validate() const;
};

/// The text generator. Implementations must be safe to call concurrently.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const std::string& prompt, std::optional<std::uint64_t> seed) const = 0;
};

/// Deterministic stand-in for an LLM. Reads the query text and target label
/// from the prompt's request block and replaces lexicon words by their
/// antonyms, each with probability `flip_probability`. A word whose class is
/// known is only replaced when that class differs from the target; words
/// without a known class are always eligible. Never throws.
class MockGenerator final : public Generator {
 public:
  MockGenerator(std::vector<LexiconEntry> lexicon, double flip_probability, std::uint64_t base_seed = 0);
  std::string generate(const std::string& prompt, std::optional<std::uint64_t> seed) const override;

  /// The rewrite applied to a bare text; exposed for tests.
  std::string rewrite(const std::string& text, const std::string& target_label, std::uint64_t seed) const;

 private:
  struct Swap {
    std::string antonym;
    std::optional<std::string> label;  // lowercased
  };
  std::map<std::string, Swap> swaps_;  // lowercased word -> swap
  double flip_probability_;
  std::uint64_t base_seed_;
};

/// OpenAI-compatible chat-completions client.
class HttpGenerator final : public Generator {
 public:
  /// Reads the API key from cfg.api_key_env; GenerationError(kConfig) when unset.
  explicit HttpGenerator(GeneratorConfig cfg);
  std::string generate(const std::string& prompt, std::optional<std::uint64_t> seed) const override;

 private:
  GeneratorConfig cfg_;
  std::string api_key_;
};

std::unique_ptr<Generator> make_generator(const GeneratorConfig& cfg);

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);
std::uint64_t hash_string(std::string_view s);

struct Candidate {
  std::size_t index = 0;  // request slot
  std::string text;
  bool tagged = false;
  std::string predicted_label;
  std::vector<double> probs;
  std::size_t distance = 0;
};

struct CandidateFailure {
  std::size_t index = 0;
  std::string error;
};

struct CandidateSet {
  Document original;
  std::string target_label;
  std::vector<Candidate> candidates;  // ascending index, failed slots absent
  std::vector<CandidateFailure> failures;
};

/// Issues n independent generate() calls (slot i uses mix_seed(seed, i)),
/// parses, classifies and measures each. Throws GenerationError when every
/// slot failed.
CandidateSet sample_candidates(const Generator& generator, const Classifier& classifier, const PromptSpec& spec,
                               std::size_t n, std::uint64_t seed, std::size_t max_parallel = 1);

}  // namespace cfx
