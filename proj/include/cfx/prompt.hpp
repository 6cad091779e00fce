#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/document.hpp"

namespace cfx {

enum class Task { kSentiment, kNli };
enum class PromptMode { kVanilla, kCgg };

/// A worked factual/counterfactual example shown before the request.
struct Shot {
  std::string source;
  std::optional<std::string> source_pair;  // hypothesis, NLI only
  std::string source_label;
  std::string target_label;
  std::string counterfactual;
  std::optional<std::vector<std::string>> important_words;
};

struct PromptSpec {
  Task task = Task::kSentiment;
  PromptMode mode = PromptMode::kVanilla;
  std::vector<Shot> shots;
  Document query;
  std::string source_label;  // the classifier's prediction for `query`
  std::string target_label;
  std::vector<std::string> important_words;
  /// Permits CGG mode with no important words (renders an empty list).
  bool empty_guidance = false;
  /// Label set named in the sentiment instruction; defaults to positive/negative.
  std::vector<std::string> class_names;
};

/// Throws std::invalid_argument when the spec is inconsistent.
void validate(const PromptSpec& spec);
std::string build_prompt(const PromptSpec& spec);

/// Renders a word list the way the reference prompts do: ['a', 'b'].
std::string format_word_list(const std::vector<std::string>& words);

struct ParsedGeneration {
  std::string text;
  bool tagged = false;
};

/// Content of the first <new>...</new> pair, trimmed. Falls back to the
/// whole output (trimmed, tagged = false) when no complete pair exists.
ParsedGeneration parse_generation(std::string_view raw);

/// Fields a generator can recover from a rendered prompt's request block.
struct PromptQuery {
  std::string text;
  std::string target_label;
};
std::optional<PromptQuery> extract_query(std::string_view prompt);

std::vector<Shot> builtin_shots(Task task);
std::vector<Shot> read_shots_jsonl(const std::string& path);

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

}  // namespace cfx
