// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace fairprio::executor {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

/// Blocking JSON POST. Implementations throw TransportError when no
/// response was received at all.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const HeaderList& headers) = 0;
};

/// cpp-httplib backed transport; supports http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_http_transport(
    std::chrono::milliseconds timeout = std::chrono::seconds(60));

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
};

/// POSTs with exponential backoff. Retries on transport failures, 429 and
/// 5xx; any other non-2xx status fails immediately. Throws TransportError
/// once attempts are exhausted. `sleep` is injectable for tests.
std::string post_with_retry(
    HttpTransport& transport, const std::string& url, const std::string& body,
    const HeaderList& headers, const RetryPolicy& policy,
    const std::function<void(std::chrono::milliseconds)>& sleep = {});

}  // namespace fairprio::executor
