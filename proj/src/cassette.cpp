// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/cassette.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include <openssl/evp.h>

#include "fairprio/error.hpp"

namespace fairprio::executor {

namespace {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ExecutionError("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace

CassetteMode parse_cassette_mode(std::string_view s) {
  if (s == "record") return CassetteMode::record;
  if (s == "replay") return CassetteMode::replay;
  if (s == "live") return CassetteMode::live;
  throw ValidationError("unknown cassette mode '" + std::string(s) +
                        "' (expected record, replay or live)");
}

std::string_view to_string(CassetteMode m) noexcept {
  switch (m) {
    case CassetteMode::record: return "record";
    case CassetteMode::replay: return "replay";
    case CassetteMode::live: return "live";
  }
  return "?";
}

Cassette::Cassette(CassetteMode mode) : mode_(mode) {}

Cassette::Cassette(std::filesystem::path path, CassetteMode mode)
    : path_(std::move(path)), mode_(mode) {
  if (!std::filesystem::exists(*path_)) return;
  std::ifstream in(*path_, std::ios::binary);
  if (!in) throw ValidationError("cannot read cassette " + path_->string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("cassette " + path_->string() + ": " + e.what(), 0);
  }
  if (!doc.is_object()) throw ValidationError("cassette must be a JSON object");
  for (const auto& [key, entry] : doc.items()) {
    if (!entry.is_object() || !entry.contains("response_text") ||
        !entry["response_text"].is_string()) {
      throw ValidationError("cassette entry " + key + " lacks response_text");
    }
    entries_[key] = Entry{entry.value("request", nlohmann::json::object()),
                          entry["response_text"].get<std::string>()};
  }
}

std::string Cassette::key_of(const nlohmann::json& request) {
  // nlohmann::json stores objects in sorted key order, so dump() is already
  // the normalized form.
  return sha256_hex(request.dump());
}

std::string Cassette::fetch(const nlohmann::json& request,
                            const std::function<std::string()>& perform) {
  if (mode_ == CassetteMode::live) {
    ++network_calls_;
    return perform();
  }
  const std::string key = key_of(request);
  {
    std::shared_lock lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second.response_text;
  }
  if (mode_ == CassetteMode::replay) {
    {
      std::unique_lock lock(mutex_);
      if (std::find(misses_.begin(), misses_.end(), key) == misses_.end()) misses_.push_back(key);
    }
    throw ReplayMissError(key);
  }
  ++network_calls_;
  std::string response = perform();
  std::unique_lock lock(mutex_);
  entries_[key] = Entry{request, response};
  save_locked();
  return response;
}

std::optional<std::string> Cassette::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.response_text;
}

void Cassette::put(const nlohmann::json& request, const std::string& response_text) {
  std::unique_lock lock(mutex_);
  entries_[key_of(request)] = Entry{request, response_text};
  save_locked();
}

std::size_t Cassette::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<std::string> Cassette::misses() const {
  std::shared_lock lock(mutex_);
  return misses_;
}

std::string Cassette::serialize() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [key, e] : entries_) {
    doc[key] = {{"request", e.request}, {"response_text", e.response_text}};
  }
  return doc.dump(1) + "\n";
}

void Cassette::save() const {
  std::unique_lock lock(mutex_);
  save_locked();
}

void Cassette::save_locked() const {
  if (!path_) return;
  const std::filesystem::path tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ExecutionError("cannot write cassette " + tmp.string());
    out << serialize();
    if (!out) throw ExecutionError("failed writing cassette " + tmp.string());
  }
  std::filesystem::rename(tmp, *path_);
}

}  // namespace fairprio::executor
