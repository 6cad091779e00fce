#include "cfx/remote_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "cfx/http.hpp"

namespace cfx {
namespace {

using Kind = RemoteClassifierError::Kind;

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SemaphoreGuard() { sem_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

RemoteClassifier::RemoteClassifier(RemoteClassifierConfig config) : config_(std::move(config)) {
  if (config_.max_in_flight < 1) throw std::invalid_argument("RemoteClassifier: max_in_flight must be >= 1");
  if (config_.retries < 0) throw std::invalid_argument("RemoteClassifier: retries must be >= 0");
  in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
}

const std::vector<std::string>& RemoteClassifier::class_names() const {
  if (!config_.class_names.empty()) return config_.class_names;
  std::lock_guard lock(discover_mu_);
  return discovered_;
}

Prediction RemoteClassifier::predict(const Document& doc) const {
  nlohmann::json req = {{"text", doc.text}, {"text_pair", nullptr}};
  if (doc.text_pair) req["text_pair"] = *doc.text_pair;
  const auto body = req.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.retry_backoff * attempt);
    HttpResult res;
    {
      SemaphoreGuard guard(*in_flight_);
      res = http_post_json(config_.endpoint, body, {}, config_.timeout);
    }
    if (res.transport_error) {
      last_error = res.error;
      continue;
    }
    if (res.status >= 500) {
      last_error = "HTTP " + std::to_string(res.status);
      continue;
    }
    if (res.status != 200) {
      throw RemoteClassifierError(Kind::kNetwork, "remote classifier returned HTTP " + std::to_string(res.status));
    }
    return parse_response(res.body);
  }
  throw RemoteClassifierError(Kind::kNetwork, "remote classifier unreachable after " +
                                                  std::to_string(config_.retries + 1) + " attempts: " + last_error);
}

Prediction RemoteClassifier::parse_response(const std::string& body) const {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw RemoteClassifierError(Kind::kMalformedResponse, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("label") || !j["label"].is_string() || !j.contains("probs") ||
      !j["probs"].is_object() || j["probs"].empty()) {
    throw RemoteClassifierError(Kind::kMalformedResponse, "response must carry a string label and a probs object");
  }

  std::vector<std::string> names = class_names();
  if (names.empty()) {
    for (const auto& [k, v] : j["probs"].items()) names.push_back(k);
  }
  Prediction p;
  p.label = j["label"].get<std::string>();
  if (std::find(names.begin(), names.end(), p.label) == names.end()) {
    throw RemoteClassifierError(Kind::kUnknownClass, "unknown class '" + p.label + "'");
  }
  p.probs.assign(names.size(), 0.0);
  double total = 0.0;
  for (const auto& [k, v] : j["probs"].items()) {
    const auto it = std::find(names.begin(), names.end(), k);
    if (it == names.end()) throw RemoteClassifierError(Kind::kUnknownClass, "unknown class '" + k + "'");
    if (!v.is_number()) throw RemoteClassifierError(Kind::kMalformedResponse, "non-numeric probability");
    const double prob = v.get<double>();
    if (!std::isfinite(prob) || prob < 0.0) {
      throw RemoteClassifierError(Kind::kMalformedResponse, "probability out of range");
    }
    p.probs[static_cast<std::size_t>(it - names.begin())] = prob;
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-3) {
    throw RemoteClassifierError(Kind::kMalformedResponse, "probabilities sum to " + std::to_string(total));
  }

  if (config_.class_names.empty()) {
    std::lock_guard lock(discover_mu_);
    if (discovered_.empty()) discovered_ = names;
  }
  return p;
}

}  // namespace cfx
