#pragma once

#include <chrono>
#include <map>
#include <string>

namespace cfx {

/// Outcome of one HTTP exchange. `transport_error` is set when no response
/// arrived (connection refused, timeout); `timed_out` narrows that case.
struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_error = false;
  bool timed_out = false;
  std::string error;
};

/// POSTs a JSON body to `url` (scheme://host[:port][/path]). https requires
/// the library to have been built with OpenSSL.
HttpResult http_post_json(const std::string& url, const std::string& body,
                          const std::map<std::string, std::string>& headers, std::chrono::milliseconds timeout);

}  // namespace cfx
