// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include <optional>
#include <thread>

#include <httplib.h>

#include "fairprio/error.hpp"
#include "fairprio/http.hpp"

namespace fairprio::executor {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("URL without scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw TransportError("unsupported URL scheme '" + scheme + "' in " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  HttpResponse post(const std::string& url, const std::string& body,
                    const HeaderList& headers) override {
    const SplitUrl parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(parts.path, h, body, "application/json");
    if (!res) {
      throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

 private:
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

std::string post_with_retry(HttpTransport& transport, const std::string& url,
                            const std::string& body, const HeaderList& headers,
                            const RetryPolicy& policy,
                            const std::function<void(std::chrono::milliseconds)>& sleep) {
  const int attempts = std::max(1, policy.max_attempts);
  std::chrono::milliseconds backoff = policy.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    std::optional<HttpResponse> res;
    try {
      res = transport.post(url, body, headers);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
    if (res) {
      if (res->status >= 200 && res->status < 300) return res->body;
      last_error = "HTTP " + std::to_string(res->status) + " from " + url;
      if (res->status != 429 && res->status < 500) throw TransportError(last_error);
    }
    if (attempt == attempts) break;
    if (sleep) {
      sleep(backoff);
    } else {
      std::this_thread::sleep_for(backoff);
    }
    backoff = std::min(policy.max_backoff, backoff * 2);
  }
  throw TransportError("giving up after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

}  // namespace fairprio::executor
