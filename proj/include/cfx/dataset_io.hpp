#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cfx/classifier.hpp"
#include "cfx/document.hpp"
#include "cfx/metrics.hpp"
#include "cfx/selection.hpp"

namespace cfx {

/// JSONL lines of {"id", "text", "text_pair", "label"}. Ids must be unique
/// and texts non-empty; std::runtime_error names the offending line.
std::vector<Document> read_documents_jsonl(const std::string& path);
void write_documents_jsonl(const std::string& path, const std::vector<Document>& docs);

nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const LinearModel& model);
LinearModel load_model(const std::string& path);

nlohmann::json record_to_json(const ReportRow& row);
ReportRow record_from_json(const nlohmann::json& j);
std::vector<ReportRow> read_records_jsonl(const std::string& path);
void write_records_jsonl(const std::string& path, const EvaluationReport& report);

nlohmann::json report_to_json(const EvaluationReport& report);

/// Writes `j.dump(2)` followed by a newline.
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace cfx
