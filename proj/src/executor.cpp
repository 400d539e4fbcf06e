// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/executor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "fairprio/error.hpp"

namespace fairprio::executor {

using prioritizer::Cell;

nlohmann::json DecodingConfig::to_json() const {
  return {{"temperature", temperature}, {"seed", seed},
          {"top_k", top_k},             {"beam_search", beam_search},
          {"length_penalty", length_penalty}, {"max_tokens", max_tokens}};
}

DecodingConfig DecodingConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("decoding: expected an object");
  DecodingConfig d;
  try {
    d.temperature = j.value("temperature", d.temperature);
    d.seed = j.value("seed", d.seed);
    d.top_k = j.value("top_k", d.top_k);
    d.beam_search = j.value("beam_search", d.beam_search);
    d.length_penalty = j.value("length_penalty", d.length_penalty);
    d.max_tokens = j.value("max_tokens", d.max_tokens);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("decoding: ") + e.what());
  }
  d.validate();
  return d;
}

void DecodingConfig::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw ValidationError("decoding.temperature must be >= 0");
  }
  if (top_k < 1) throw ValidationError("decoding.top_k must be >= 1");
  if (max_tokens < 1) throw ValidationError("decoding.max_tokens must be >= 1");
  if (!std::isfinite(length_penalty)) throw ValidationError("decoding.length_penalty must be finite");
}

ChatClient::ChatClient(ModelEndpoint endpoint, DecodingConfig decoding,
                       std::shared_ptr<Cassette> cassette, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      decoding_(decoding),
      cassette_(std::move(cassette)),
      transport_(std::move(transport)) {
  if (!cassette_) throw ValidationError("chat client needs a cassette");
  if (endpoint_.model_id.empty()) throw ValidationError("model id is empty");
  decoding_.validate();
}

nlohmann::json ChatClient::key_request(const std::string& prompt) const {
  return {{"kind", "chat"},
          {"model", endpoint_.model_id},
          {"prompt", prompt},
          {"decoding", decoding_.to_json()}};
}

nlohmann::json ChatClient::wire_body(const std::string& prompt) const {
  return {{"model", endpoint_.model_id},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
          {"temperature", decoding_.temperature},
          {"seed", decoding_.seed},
          {"max_tokens", decoding_.max_tokens}};
}

std::string ChatClient::complete(const std::string& prompt) const {
  const std::string body = cassette_->fetch(key_request(prompt), [&] {
    if (!transport_) throw TransportError("no HTTP transport configured");
    if (endpoint_.base_url.empty()) throw TransportError("model base_url is not configured");
    std::string url = endpoint_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    HeaderList headers;
    if (!endpoint_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + endpoint_.api_key);
    return post_with_retry(*transport_, url + "/chat/completions", wire_body(prompt).dump(), headers,
                           endpoint_.retry);
  });
  return parse_chat_content(body);
}

std::string parse_chat_content(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what());
  }
}

std::string make_chat_body(const std::string& model, const std::string& content) {
  const nlohmann::json j = {
      {"object", "chat.completion"},
      {"model", model},
      {"choices", nlohmann::json::array({{{"index", 0},
                                          {"message", {{"role", "assistant"}, {"content", content}}},
                                          {"finish_reason", "stop"}}})}};
  return j.dump();
}

std::string pair_id(const mr::TestPair& pair) {
  return pair.mr_id.str() + "/" + pair.source.id;
}

PairEvaluation evaluate_pair(const mr::TestPair& pair, const ChatClient& client,
                             const analyzers::SentimentProvider& sentiment) {
  PairEvaluation out;
  // Both prompts are attempted even after a failure, so a replay run
  // reports every missing key at once.
  std::optional<std::string> responses[2];
  const std::string* prompts[2] = {&pair.source.text, &pair.follow_up_text};
  for (int i = 0; i < 2; ++i) {
    try {
      responses[i] = client.complete(*prompts[i]);
    } catch (const ReplayMissError& e) {
      out.missing_keys.push_back(e.key());
      if (!out.errored) out.error = pair_id(pair) + ": " + e.what();
      out.errored = true;
    } catch (const Error& e) {
      if (!out.errored) out.error = pair_id(pair) + ": " + e.what();
      out.errored = true;
    }
  }
  if (out.errored) return out;
  try {
    out.source_label = sentiment.sentiment(*responses[0]).label;
    out.follow_label = sentiment.sentiment(*responses[1]).label;
    out.violation = out.source_label != out.follow_label;
  } catch (const Error& e) {
    out.errored = true;
    out.error = pair_id(pair) + ": " + e.what();
  }
  return out;
}

ExecutionReport build_outcome_matrix(const std::vector<std::string>& case_ids,
                                     const std::map<MrId, std::vector<mr::TestPair>>& pairs_by_mr,
                                     const ChatClient& client,
                                     const analyzers::SentimentProvider& sentiment,
                                     const ExecutionOptions& options) {
  if (options.max_concurrency == 0) throw ValidationError("max_concurrency must be >= 1");
  if (!(options.max_errored_fraction >= 0.0 && options.max_errored_fraction <= 1.0)) {
    throw ValidationError("max_errored_fraction must lie in [0, 1]");
  }
  std::vector<MrId> mr_ids;
  for (const auto& [id, _] : pairs_by_mr) mr_ids.push_back(id);
  ExecutionReport report{prioritizer::OutcomeMatrix(mr_ids, case_ids), 0, {}, {}};

  struct Task {
    std::size_t row;
    std::size_t col;
    const mr::TestPair* pair;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < mr_ids.size(); ++r) {
    std::set<std::size_t> seen;
    for (const auto& p : pairs_by_mr.at(mr_ids[r])) {
      if (p.mr_id != mr_ids[r]) {
        throw ValidationError("pair " + pair_id(p) + " listed under " + mr_ids[r].str());
      }
      const std::size_t c = report.matrix.col_of(p.source.id);
      if (!seen.insert(c).second) throw ValidationError("duplicate pair " + pair_id(p));
      tasks.push_back({r, c, &p});
    }
  }

  std::vector<PairEvaluation> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      slots[i] = evaluate_pair(*tasks[i].pair, client, sentiment);
    }
  };
  {
    const std::size_t n = std::min(options.max_concurrency, std::max<std::size_t>(1, tasks.size()));
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  std::set<std::string> missing;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& e = slots[i];
    if (e.errored) {
      report.matrix.set(tasks[i].row, tasks[i].col, Cell::errored);
      report.errors.push_back(e.error);
      for (const auto& key : e.missing_keys) {
        if (missing.insert(key).second) report.missing_keys.push_back(key);
      }
    } else {
      report.matrix.set(tasks[i].row, tasks[i].col, e.violation ? Cell::violation : Cell::pass);
      ++report.evaluated;
    }
  }
  if (!report.missing_keys.empty()) throw ReplayMissError(report.missing_keys);
  if (!tasks.empty()) {
    const double frac = static_cast<double>(report.errors.size()) / static_cast<double>(tasks.size());
    if (frac > options.max_errored_fraction) {
      std::string msg = std::to_string(report.errors.size()) + " of " + std::to_string(tasks.size()) +
                        " pairs errored (limit " + std::to_string(options.max_errored_fraction) + "):";
      for (const auto& line : report.errors) msg += "\n  " + line;
      throw ExecutionError(msg);
    }
  }
  return report;
}

}  // namespace fairprio::executor
