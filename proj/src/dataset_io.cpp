#include "cfx/dataset_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace cfx {
namespace {

using nlohmann::json;

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

template <typename T>
json nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

json document_to_json(const Document& doc) {
  return {{"id", doc.id}, {"text", doc.text}, {"text_pair", nullable(doc.text_pair)}, {"label", nullable(doc.label)}};
}

Document document_from_json(const json& j) {
  Document d;
  d.id = j.at("id").get<std::string>();
  d.text = j.at("text").get<std::string>();
  d.text_pair = optional_field<std::string>(j, "text_pair");
  d.label = optional_field<std::string>(j, "label");
  return d;
}

std::vector<Document> read_documents_jsonl(const std::string& path) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  for (const auto& j : read_jsonl(path)) {
    Document d;
    try {
      d = document_from_json(j);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ": document " + std::to_string(docs.size() + 1) + ": " + e.what());
    }
    if (d.text.empty()) throw std::runtime_error(path + ": document '" + d.id + "' has empty text");
    if (!ids.insert(d.id).second) throw std::runtime_error(path + ": duplicate document id '" + d.id + "'");
    docs.push_back(std::move(d));
  }
  return docs;
}

void write_documents_jsonl(const std::string& path, const std::vector<Document>& docs) {
  auto out = open_out(path);
  for (const auto& d : docs) out << document_to_json(d).dump() << "\n";
}

json model_to_json(const LinearModel& model) {
  std::vector<std::string> words(model.num_features());
  for (const auto& [w, idx] : model.vocabulary()) words[idx] = w;
  json weights = json::array();
  json bias = json::array();
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    json row = json::array();
    for (std::size_t j = 0; j < model.num_features(); ++j) row.push_back(model.weight(c, j));
    weights.push_back(std::move(row));
    bias.push_back(model.bias(c));
  }
  return {{"class_names", model.class_names()},
          {"feature_mode", model.feature_mode() == FeatureMode::kBinary ? "binary" : "count"},
          {"vocabulary", words},
          {"weights", weights},
          {"bias", bias}};
}

LinearModel model_from_json(const json& j) {
  const auto words = j.at("vocabulary").get<std::vector<std::string>>();
  std::map<std::string, std::size_t> vocab;
  for (const auto& w : words) {
    if (!vocab.emplace(w, vocab.size()).second) throw std::invalid_argument("model: duplicate vocabulary word");
  }
  const auto mode_name = j.value("feature_mode", std::string("binary"));
  if (mode_name != "binary" && mode_name != "count") throw std::invalid_argument("model: unknown feature_mode");
  LinearModel model(std::move(vocab), j.at("class_names").get<std::vector<std::string>>(),
                    mode_name == "binary" ? FeatureMode::kBinary : FeatureMode::kCount);
  const auto& weights = j.at("weights");
  const auto& bias = j.at("bias");
  if (weights.size() != model.num_classes() || bias.size() != model.num_classes()) {
    throw std::invalid_argument("model: parameter shape mismatch");
  }
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    if (weights[c].size() != model.num_features()) throw std::invalid_argument("model: weight row size mismatch");
    for (std::size_t f = 0; f < model.num_features(); ++f) model.weight(c, f) = weights[c][f].get<double>();
    model.bias(c) = bias[c].get<double>();
  }
  model.validate();
  return model;
}

void save_model(const std::string& path, const LinearModel& model) { write_json(path, model_to_json(model)); }

LinearModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  try {
    return model_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("model '" + path + "': " + e.what());
  }
}

json record_to_json(const ReportRow& row) {
  const auto& r = row.record;
  json j = {
      {"id", r.original.id},
      {"text", r.original.text},
      {"text_pair", nullable(r.original.text_pair)},
      {"gold_label", nullable(r.original.label)},
      {"original_label", r.original_label},
      {"target_label", r.target_label},
      {"counterfactual", r.counterfactual_text},
      {"flipped", r.flipped},
      {"distance", r.distance},
      {"method", method_name(r.method)},
      {"important_words", nullable(r.important_words)},
      {"candidate_count_used", r.candidate_count_used},
      {"candidate_index", r.candidate_index},
      {"tagged", r.tagged},
      {"perplexity", nullable(row.perplexity)},
      {"modification_rate", nullable(row.modification_rate)},
      {"quality", nullptr},
  };
  if (row.quality) {
    j["quality"] = {{"grammar", row.quality->grammar},
                    {"cohesiveness", row.quality->cohesiveness},
                    {"fluency", row.quality->fluency}};
  }
  return j;
}

ReportRow record_from_json(const json& j) {
  ReportRow row;
  auto& r = row.record;
  r.original.id = j.at("id").get<std::string>();
  r.original.text = j.at("text").get<std::string>();
  r.original.text_pair = optional_field<std::string>(j, "text_pair");
  r.original.label = optional_field<std::string>(j, "gold_label");
  r.original_label = j.at("original_label").get<std::string>();
  r.target_label = j.at("target_label").get<std::string>();
  r.counterfactual_text = j.at("counterfactual").get<std::string>();
  r.flipped = j.at("flipped").get<bool>();
  r.distance = j.at("distance").get<std::size_t>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.important_words = optional_field<std::vector<std::string>>(j, "important_words");
  r.candidate_count_used = j.value("candidate_count_used", std::size_t{1});
  r.candidate_index = j.value("candidate_index", std::size_t{0});
  r.tagged = j.value("tagged", true);
  row.perplexity = optional_field<double>(j, "perplexity");
  row.modification_rate = optional_field<double>(j, "modification_rate");
  if (j.contains("quality") && !j["quality"].is_null()) {
    const auto& q = j["quality"];
    row.quality = QualityScores{q.at("grammar").get<int>(), q.at("cohesiveness").get<int>(), q.at("fluency").get<int>()};
  }
  return row;
}

std::vector<ReportRow> read_records_jsonl(const std::string& path) {
  std::vector<ReportRow> rows;
  for (const auto& j : read_jsonl(path)) {
    try {
      rows.push_back(record_from_json(j));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ": record " + std::to_string(rows.size() + 1) + ": " + e.what());
    }
  }
  return rows;
}

void write_records_jsonl(const std::string& path, const EvaluationReport& report) {
  auto out = open_out(path);
  for (const auto& row : report.rows) out << record_to_json(row).dump() << "\n";
}

json report_to_json(const EvaluationReport& report) {
  json records = json::array();
  for (const auto& row : report.rows) records.push_back(record_to_json(row));
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  json quality = nullptr;
  if (report.quality) {
    quality = {{"grammar", report.quality->grammar},
               {"cohesiveness", report.quality->cohesiveness},
               {"fluency", report.quality->fluency}};
  }
  return {
      {"n", report.n},
      {"flip_rate", report.flip_rate},
      {"mean_distance", report.mean_distance},
      {"mean_perplexity", nullable(report.mean_perplexity)},
      {"mean_modification_rate", nullable(report.mean_modification_rate)},
      {"quality", quality},
      {"records", records},
      {"failures", failures},
  };
}

void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace cfx
