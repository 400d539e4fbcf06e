// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fairprio::executor {

enum class CassetteMode { record, replay, live };

CassetteMode parse_cassette_mode(std::string_view s);
std::string_view to_string(CassetteMode m) noexcept;

/// Persistent request -> response map for every remote exchange.
///
/// replay: answers from the map only and never calls `perform`.
/// record: answers from the map when possible, otherwise calls `perform`
///         and persists the new entry before returning it.
/// live:   always calls `perform`; nothing is read or written.
///
/// The file is a JSON object key -> {request, response_text}, rewritten
/// atomically (temp file + rename). Reads are concurrent, writes serialized.
class Cassette {
 public:
  /// In-memory cassette (no file).
  explicit Cassette(CassetteMode mode);
  /// Loads `path` if it exists. Replay mode tolerates a missing file (every
  /// lookup then misses).
  Cassette(std::filesystem::path path, CassetteMode mode);

  Cassette(const Cassette&) = delete;
  Cassette& operator=(const Cassette&) = delete;

  /// SHA-256 hex of the request serialized with sorted keys.
  static std::string key_of(const nlohmann::json& request);

  std::string fetch(const nlohmann::json& request,
                    const std::function<std::string()>& perform);

  std::optional<std::string> lookup(const std::string& key) const;
  /// Adds or replaces an entry and persists (if file-backed).
  void put(const nlohmann::json& request, const std::string& response_text);

  CassetteMode mode() const noexcept { return mode_; }
  std::size_t size() const;
  std::size_t network_calls() const noexcept { return network_calls_.load(); }
  /// Keys that missed in replay mode, in first-miss order.
  std::vector<std::string> misses() const;

  void save() const;
  std::string serialize() const;

 private:
  struct Entry {
    nlohmann::json request;
    std::string response_text;
  };

  void save_locked() const;

  std::optional<std::filesystem::path> path_;
  CassetteMode mode_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> misses_;
  std::atomic<std::size_t> network_calls_{0};
};

}  // namespace fairprio::executor
