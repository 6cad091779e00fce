#include "cfx/prompt.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cfx {
namespace {

constexpr std::string_view kOpenTag = "<new>";
constexpr std::string_view kCloseTag = "</new>";

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Prompts are line-oriented; embedded line breaks would split a text field.
std::string one_line(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return out;
}

std::string display_label(Task task, std::string_view label) {
  std::string out(label);
  if (task == Task::kSentiment && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::string either_clause(const std::vector<std::string>& names) {
  if (names.empty()) return "positive or negative";
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? " or " : ", ";
    out += names[i];
  }
  return out;
}

std::string sentiment_task_sentence(const PromptSpec& spec) {
  return "given a movie review with its original sentiment classified as either " + either_clause(spec.class_names) +
         " by a classifier, your task is to modify the text with minimal edits to flip the sentiment prediction of "
         "the classifier.";
}

void render_sentiment(const PromptSpec& spec, std::ostringstream& out) {
  const bool cgg = spec.mode == PromptMode::kCgg;
  auto sentence = sentiment_task_sentence(spec);
  sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
  out << sentence << " Please enclose the generated text within <new> and </new> tags\n";
  if (cgg) {
    out << "You will be provided with a list of important words identified by the classifier as influential in its "
           "prediction (First word is the most important). Use these words as a guide for your changes, ensuring "
           "that the text remains fluent. Avoid making any unnecessary changes.\n";
  } else {
    out << "Avoid making any unnecessary changes.\n";
  }

  for (std::size_t i = 0; i < spec.shots.size(); ++i) {
    const auto& shot = spec.shots[i];
    if (spec.shots.size() == 1) {
      out << "Example:\n";
    } else {
      out << "Example " << (i + 1) << ":\n";
    }
    out << display_label(spec.task, shot.source_label) << ": " << one_line(shot.source) << "\n";
    out << "Target sentiment: " << display_label(spec.task, shot.target_label) << "\n";
    if (cgg && shot.important_words && !shot.important_words->empty()) {
      out << "You must change these following important words: " << format_word_list(*shot.important_words)
          << " to achieve the target sentiment.\n";
    }
    out << "Generated Text:\n";
    out << display_label(spec.task, shot.target_label) << ": " << kOpenTag << one_line(shot.counterfactual)
        << kCloseTag << "\n";
  }

  out << "Request: Similarly, " << sentiment_task_sentence(spec) << "\n";
  out << display_label(spec.task, spec.source_label) << ": " << one_line(spec.query.text) << "\n";
  out << "Target sentiment: " << display_label(spec.task, spec.target_label) << "\n";
  if (cgg) {
    out << "You must change these following important words: " << format_word_list(spec.important_words)
        << " to achieve the target sentiment.\n";
  }
  out << "You must enclose your generated text within opening '<new>' and closing '</new>' tags, like the examples "
         "above. No further explanations are needed. Your generated text:\n";
}

constexpr std::string_view kNliGuidance =
    "You will be provided with an ordered list of important words identified by the classifier as influential in "
    "its prediction (First word is the most important). Use these words as a guide for your changes.\n";

void render_nli(const PromptSpec& spec, std::ostringstream& out) {
  const bool cgg = spec.mode == PromptMode::kCgg;
  out << "Context: For NLI task, given two sentences (premise and hypothesis) and their original relationship, "
         "determine whether they entail, contradict, or are neutral to each other. Change the premise with minimal "
         "edits to achieve the "
      << spec.target_label << " relationship from the original one. Do not make any unnecessary changes.\n";
  if (cgg) out << kNliGuidance;
  out << "Do not make any unnecessary changes. Make as few edits as possible. You must enclose your generated text "
         "within opening '<new>' and closing '</new>' tags, like the examples above. No further explanations are "
         "needed.\n";

  for (std::size_t i = 0; i < spec.shots.size(); ++i) {
    const auto& shot = spec.shots[i];
    if (spec.shots.size() == 1) {
      out << "For example:\n";
    } else {
      out << "Example " << (i + 1) << ":\n";
    }
    out << "Original relationship: " << shot.source_label << "\n";
    out << "Premise: " << one_line(shot.source) << "\n";
    out << "Hypothesis: " << one_line(shot.source_pair.value_or("")) << "\n";
    out << "Target relationship: " << shot.target_label << "\n";
    if (cgg && shot.important_words && !shot.important_words->empty()) {
      out << "You must change these following words: " << format_word_list(*shot.important_words)
          << " in the premise to achieve the target relation .\n";
    }
    out << "(Edited premise): " << kOpenTag << one_line(shot.counterfactual) << kCloseTag << "\n";
  }

  out << "\nRequest: Similarly, given two sentences (premise and hypothesis) below and their original relationship. "
         "Change the premise with minimal edits to achieve the target "
      << spec.target_label << " relationship.\n";
  if (cgg) out << kNliGuidance;
  out << "Original relationship: " << spec.source_label << "\n";
  out << "Premise: " << one_line(spec.query.text) << "\n";
  out << "Hypothesis: " << one_line(spec.query.text_pair.value_or("")) << "\n";
  out << "Target relationship: " << spec.target_label << "\n";
  if (cgg) {
    out << "You must change these following words: " << format_word_list(spec.important_words)
        << " in the premise to achieve the target relation .\n";
  }
  out << "Do not make any unnecessary changes. Make as few edits as possible. You must enclose your premise within "
         "opening '<new>' and closing '</new>' tags, like the examples above. No further explanations are needed. "
         "Only return the premise.\n";
  out << "(Edited premise):\n";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

void validate(const PromptSpec& spec) {
  if (spec.shots.empty()) throw std::invalid_argument("prompt: at least one shot is required");
  if (spec.target_label.empty()) throw std::invalid_argument("prompt: empty target label");
  if (lower(spec.target_label) == lower(spec.source_label)) {
    throw std::invalid_argument("prompt: target label equals the source label '" + spec.source_label + "'");
  }
  if (spec.mode == PromptMode::kCgg && spec.important_words.empty() && !spec.empty_guidance) {
    throw std::invalid_argument("prompt: CGG mode requires important words");
  }
}

std::string build_prompt(const PromptSpec& spec) {
  validate(spec);
  std::ostringstream out;
  if (spec.task == Task::kSentiment) {
    render_sentiment(spec, out);
  } else {
    render_nli(spec, out);
  }
  return out.str();
}

std::string format_word_list(const std::vector<std::string>& words) {
  std::string out = "[";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    const char quote = words[i].find('\'') != std::string::npos ? '"' : '\'';
    out += quote;
    out += words[i];
    out += quote;
  }
  out += "]";
  return out;
}

ParsedGeneration parse_generation(std::string_view raw) {
  const auto open = raw.find(kOpenTag);
  if (open != std::string_view::npos) {
    const auto start = open + kOpenTag.size();
    const auto close = raw.find(kCloseTag, start);
    if (close != std::string_view::npos) return {trim(raw.substr(start, close - start)), true};
  }
  return {trim(raw), false};
}

std::optional<PromptQuery> extract_query(std::string_view prompt) {
  const auto req = prompt.rfind("Request:");
  if (req == std::string_view::npos) return std::nullopt;

  std::vector<std::string_view> lines;
  std::size_t pos = req;
  while (pos < prompt.size()) {
    auto nl = prompt.find('\n', pos);
    if (nl == std::string_view::npos) nl = prompt.size();
    lines.push_back(prompt.substr(pos, nl - pos));
    pos = nl + 1;
  }

  PromptQuery q;
  bool have_text = false;
  for (const auto& line : lines) {
    if (line.starts_with("Premise: ")) {
      q.text = std::string(line.substr(9));
      have_text = true;
    } else if (line.starts_with("Target sentiment: ")) {
      q.target_label = trim(line.substr(18));
    } else if (line.starts_with("Target relationship: ")) {
      q.target_label = trim(line.substr(21));
    }
  }
  if (!have_text && lines.size() > 1) {
    // Sentiment layout: the line after the request sentence is "<Label>: <text>".
    const auto line = lines[1];
    const auto colon = line.find(": ");
    if (colon == std::string_view::npos) return std::nullopt;
    q.text = std::string(line.substr(colon + 2));
    have_text = true;
  }
  if (!have_text) return std::nullopt;
  return q;
}

std::vector<Shot> builtin_shots(Task task) {
  if (task == Task::kSentiment) {
    return {
        {"Long, boring, blasphemous. Never have I been so glad to see ending credits roll.", std::nullopt,
         "negative", "positive",
         "Long, fascinating, soulful. Never have I been so sad to see ending credits roll.",
         std::vector<std::string>{"boring,", "blasphemous.", "glad"}},
        {"A warm, funny and clever film with a wonderful cast.", std::nullopt, "positive", "negative",
         "A cold, unfunny and dumb film with a dreadful cast.",
         std::vector<std::string>{"wonderful", "funny", "clever", "warm"}},
        {"The plot was dull and the acting was terrible, a tedious two hours.", std::nullopt, "negative",
         "positive", "The plot was gripping and the acting was superb, a delightful two hours.",
         std::vector<std::string>{"terrible", "dull", "tedious"}},
        {"I found the script smart and the ending genuinely moving.", std::nullopt, "positive", "negative",
         "I found the script stupid and the ending genuinely lifeless.",
         std::vector<std::string>{"moving", "smart"}},
    };
  }
  return {
      {"Seven people are racing bikes on a sandy track.", "The people are racing.", "entailment", "neutral",
       "Seven people are riding bikes on a sandy track.", std::vector<std::string>{"racing"}},
      {"A woman is slicing tomatoes in a kitchen.", "A woman is cooking.", "entailment", "contradiction",
       "A woman is sleeping in a bedroom.", std::vector<std::string>{"slicing", "kitchen"}},
      {"Two dogs run through a snowy field.", "The dogs are indoors.", "contradiction", "entailment",
       "Two dogs run through a snowy room indoors.", std::vector<std::string>{"field"}},
      {"A child holds a red balloon at the fair.", "The child is happy.", "neutral", "entailment",
       "A smiling child happily holds a red balloon at the fair.", std::vector<std::string>{"holds"}},
  };
}

std::vector<Shot> read_shots_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open exemplar file '" + path + "'");
  std::vector<Shot> shots;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Shot s;
      s.source = j.at("source").get<std::string>();
      s.source_label = j.at("source_label").get<std::string>();
      s.target_label = j.at("target_label").get<std::string>();
      s.counterfactual = j.at("counterfactual").get<std::string>();
      if (j.contains("source_pair") && !j["source_pair"].is_null()) s.source_pair = j["source_pair"].get<std::string>();
      if (j.contains("important_words") && !j["important_words"].is_null()) {
        s.important_words = j["important_words"].get<std::vector<std::string>>();
      }
      shots.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return shots;
}

std::string_view task_name(Task task) { return task == Task::kSentiment ? "sentiment" : "nli"; }

Task parse_task(std::string_view name) {
  if (name == "sentiment") return Task::kSentiment;
  if (name == "nli") return Task::kNli;
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

}  // namespace cfx
