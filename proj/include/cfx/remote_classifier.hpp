#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfx/classifier.hpp"

namespace cfx {

class RemoteClassifierError : public std::runtime_error {
 public:
  enum class Kind { kNetwork, kMalformedResponse, kUnknownClass };
  RemoteClassifierError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct RemoteClassifierConfig {
  std::string endpoint;
  /// Expected label set, in output order. Empty: adopt the class set of
  /// the first response.
  std::vector<std::string> class_names;
  int retries = 2;  // extra attempts after a network failure or 5xx
  std::chrono::milliseconds timeout{10000};
  std::chrono::milliseconds retry_backoff{100};
  int max_in_flight = 4;
};

/// Client for an external classifier speaking
///   POST {"text": str, "text_pair": str|null} -> {"label": str, "probs": {class: p}}
class RemoteClassifier final : public Classifier {
 public:
  explicit RemoteClassifier(RemoteClassifierConfig config);

  /// Populated by the constructor when configured, otherwise after the first
  /// successful predict().
  const std::vector<std::string>& class_names() const override;
  Prediction predict(const Document& doc) const override;

 private:
  Prediction parse_response(const std::string& body) const;

  RemoteClassifierConfig config_;
  mutable std::vector<std::string> discovered_;
  mutable std::mutex discover_mu_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace cfx
