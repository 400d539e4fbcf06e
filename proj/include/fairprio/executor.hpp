// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairprio/cassette.hpp"
#include "fairprio/http.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/outcome_matrix.hpp"
#include "fairprio/providers.hpp"

namespace fairprio::executor {

/// Deterministic decoding profile by default.
struct DecodingConfig {
  double temperature = 0.0;
  int seed = 42;
  int top_k = 1;
  bool beam_search = false;
  double length_penalty = 1.0;
  int max_tokens = 150;

  nlohmann::json to_json() const;
  /// Missing fields keep their defaults. Throws ValidationError on bad values.
  static DecodingConfig from_json(const nlohmann::json& j);
  void validate() const;
};

struct ModelEndpoint {
  std::string model_id;
  std::string base_url;  // <base_url>/chat/completions
  std::string api_key;   // bearer token
  RetryPolicy retry;
};

/// OpenAI-compatible chat-completions client; every exchange goes through
/// the cassette. The cassette stores the raw response body.
class ChatClient {
 public:
  ChatClient(ModelEndpoint endpoint, DecodingConfig decoding, std::shared_ptr<Cassette> cassette,
             std::shared_ptr<HttpTransport> transport);

  /// Cassette key material: model id, prompt and decoding config. The
  /// endpoint URL and credential are not part of it.
  nlohmann::json key_request(const std::string& prompt) const;
  /// Wire body sent to the endpoint.
  nlohmann::json wire_body(const std::string& prompt) const;

  /// Message content of the first choice. Throws ReplayMissError,
  /// TransportError (after retries) or TransportError for malformed bodies.
  std::string complete(const std::string& prompt) const;

  const ModelEndpoint& endpoint() const noexcept { return endpoint_; }
  const DecodingConfig& decoding() const noexcept { return decoding_; }

 private:
  ModelEndpoint endpoint_;
  DecodingConfig decoding_;
  std::shared_ptr<Cassette> cassette_;
  std::shared_ptr<HttpTransport> transport_;
};

/// Content of choices[0].message.content in a chat-completions body.
std::string parse_chat_content(const std::string& body);
/// Chat-completions body carrying `content`; used by stubs and fixtures.
std::string make_chat_body(const std::string& model, const std::string& content);

struct PairEvaluation {
  bool errored = false;
  bool violation = false;
  analyzers::SentimentLabel source_label = analyzers::SentimentLabel::positive;
  analyzers::SentimentLabel follow_label = analyzers::SentimentLabel::positive;
  std::string error;                       // set when errored
  std::vector<std::string> missing_keys;   // replay misses behind the error
};

/// "<MR>/<case id>", used in error messages.
std::string pair_id(const mr::TestPair& pair);

/// Completes both prompts and compares their sentiment labels. Never
/// throws for completion failures; those mark the result errored.
PairEvaluation evaluate_pair(const mr::TestPair& pair, const ChatClient& client,
                             const analyzers::SentimentProvider& sentiment);

struct ExecutionOptions {
  std::size_t max_concurrency = 4;
  /// Errored pairs above this fraction of evaluated pairs abort the run.
  double max_errored_fraction = 0.05;
};

struct ExecutionReport {
  prioritizer::OutcomeMatrix matrix;
  std::size_t evaluated = 0;  // pass + violation cells
  std::vector<std::string> errors;  // one line per errored pair
  std::vector<std::string> missing_keys;
};

/// Evaluates every pair once on a bounded worker pool. Rows follow the map
/// (ascending MR id), columns follow `case_ids`. Cells without a pair stay
/// skipped; failed pairs become errored.
///
/// Throws ReplayMissError listing every missing key when any pair missed in
/// replay, and ExecutionError when the errored fraction exceeds the limit.
ExecutionReport build_outcome_matrix(const std::vector<std::string>& case_ids,
                                     const std::map<MrId, std::vector<mr::TestPair>>& pairs_by_mr,
                                     const ChatClient& client,
                                     const analyzers::SentimentProvider& sentiment,
                                     const ExecutionOptions& options = {});

}  // namespace fairprio::executor
