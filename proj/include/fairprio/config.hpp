// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairprio/cassette.hpp"
#include "fairprio/executor.hpp"
#include "fairprio/mr_id.hpp"

namespace fairprio::config {

/// "builtin", or "remote" with an endpoint. The bearer token is read from
/// the environment variable named by token_env, never from the file.
struct ProviderSpec {
  std::string type = "builtin";
  std::string name;
  std::string url;
  std::string token_env;
};

/// Corpus generated from a template instead of read from a file.
struct CorpusTemplate {
  std::string text;
  std::vector<std::string> slots;
  std::string id_prefix = "tpl";
  std::size_t max_cases = 0;
};

struct ModelSpec {
  std::string id;
  std::string base_url;
  std::string api_key_env;
  executor::DecodingConfig decoding;
  executor::RetryPolicy retry;
  int timeout_seconds = 60;
};

/// One JSON file describing a whole run. Relative paths resolve against the
/// directory of the config file.
struct RunConfig {
  std::filesystem::path base_dir;
  std::optional<std::filesystem::path> corpus_path;
  std::optional<CorpusTemplate> corpus_template;
  std::optional<std::filesystem::path> gazetteer_path;
  std::optional<std::filesystem::path> templates_path;
  std::vector<MrId> mrs;  // selected relations, ascending

  std::uint64_t corpus_seed = 0;
  std::uint64_t mr_seed = 0;
  std::uint64_t random_seed = 0;
  std::size_t random_count = 1000;
  std::optional<std::uint64_t> fault_tie_seed;
  bool distance_invert = false;

  ProviderSpec embedding;
  ProviderSpec sentiment;
  ProviderSpec tone;
  ModelSpec model;

  std::optional<std::filesystem::path> cassette_path;
  executor::CassetteMode cassette_mode = executor::CassetteMode::replay;
  executor::ExecutionOptions execution;
  std::filesystem::path output_dir;

  /// Parses and validates. Errors name the offending field.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  /// Replaces the corpus, MR and random-baseline seeds.
  void override_seeds(std::uint64_t seed);

  /// Effective settings (no secrets), recorded in reports.
  nlohmann::ordered_json snapshot() const;
};

/// Value of the environment variable, or ValidationError naming the field
/// that requires it.
std::string require_env(const std::string& var, const std::string& field);

}  // namespace fairprio::config
