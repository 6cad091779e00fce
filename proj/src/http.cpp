#include "cfx/http.hpp"

#include <stdexcept>

#include <httplib.h>

namespace cfx {
namespace {

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL without scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResult http_post_json(const std::string& url, const std::string& body,
                          const std::map<std::string, std::string>& headers, std::chrono::milliseconds timeout) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  if (!client.is_valid()) {
    HttpResult r;
    r.transport_error = true;
    r.error = "unsupported endpoint '" + parts.origin + "'";
    return r;
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  HttpResult result;
  auto res = client.Post(parts.path, hdrs, body, "application/json");
  if (!res) {
    result.transport_error = true;
    const auto err = res.error();
    result.timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
    result.error = httplib::to_string(err);
    return result;
  }
  result.status = res->status;
  result.body = res->body;
  return result;
}

}  // namespace cfx
