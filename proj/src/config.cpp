// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/config.hpp"

#include <chrono>
#include <cstdlib>
#include <set>

#include "fairprio/error.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/serialization.hpp"

namespace fairprio::config {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys = {
    "corpus",    "corpus_template", "gazetteer", "mr_templates",    "mrs",
    "seeds",     "random_count",    "fault_tie_seed", "distance_invert", "providers",
    "model",     "cassette",        "executor",  "output_dir"};

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError("config field '" + field + "': " + msg);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& field) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(field, j.contains(key) ? "wrong type" : "missing");
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& field, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return get<T>(j, key, field);
}

fs::path existing_path(const json& j, const std::string& key, const fs::path& base) {
  fs::path p = get<std::string>(j, key, key);
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) fail(key, "path does not exist: " + p.string());
  return p;
}

ProviderSpec provider(const json& j, const std::string& field) {
  ProviderSpec p;
  if (j.is_null()) return p;
  if (!j.is_object()) fail(field, "expected an object");
  p.type = get_or<std::string>(j, "type", field + ".type", "builtin");
  if (p.type == "builtin") return p;
  if (p.type != "remote") fail(field + ".type", "expected 'builtin' or 'remote'");
  p.name = get<std::string>(j, "name", field + ".name");
  p.url = get<std::string>(j, "url", field + ".url");
  p.token_env = get_or<std::string>(j, "token_env", field + ".token_env", "");
  if (p.name.empty()) fail(field + ".name", "must not be empty");
  if (p.url.empty()) fail(field + ".url", "must not be empty");
  return p;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!kTopLevelKeys.count(k)) fail(k, "unknown field");
  }
  RunConfig c;
  c.base_dir = base_dir;

  if (j.contains("corpus") == j.contains("corpus_template")) {
    fail("corpus", "exactly one of 'corpus' and 'corpus_template' is required");
  }
  if (j.contains("corpus")) {
    c.corpus_path = existing_path(j, "corpus", base_dir);
  } else {
    const auto& t = j["corpus_template"];
    if (!t.is_object()) fail("corpus_template", "expected an object");
    CorpusTemplate ct;
    ct.text = get<std::string>(t, "template", "corpus_template.template");
    ct.slots = get<std::vector<std::string>>(t, "slots", "corpus_template.slots");
    ct.id_prefix = get_or<std::string>(t, "id_prefix", "corpus_template.id_prefix", "tpl");
    ct.max_cases = get_or<std::size_t>(t, "max_cases", "corpus_template.max_cases", 0);
    c.corpus_template = std::move(ct);
  }
  if (j.contains("gazetteer")) c.gazetteer_path = existing_path(j, "gazetteer", base_dir);
  if (j.contains("mr_templates")) c.templates_path = existing_path(j, "mr_templates", base_dir);

  if (!j.contains("mrs") || (j["mrs"].is_string() && j["mrs"] == "all")) {
    for (const auto& d : mr::registry()) c.mrs.push_back(d.id);
  } else {
    const auto names = get<std::vector<std::string>>(j, "mrs", "mrs");
    if (names.empty()) fail("mrs", "select at least one MR");
    std::set<MrId> ids;
    for (const auto& n : names) {
      MrId id;
      try {
        id = MrId::parse(n);
        mr::definition(id);
      } catch (const ValidationError& e) {
        fail("mrs", e.what());
      }
      if (!ids.insert(id).second) fail("mrs", "duplicate " + n);
    }
    c.mrs.assign(ids.begin(), ids.end());
  }

  if (!j.contains("seeds") || !j["seeds"].is_object()) {
    fail("seeds", "an object with explicit corpus, mr and random_baseline seeds is required");
  }
  const auto& seeds = j["seeds"];
  c.corpus_seed = get<std::uint64_t>(seeds, "corpus", "seeds.corpus");
  c.mr_seed = get<std::uint64_t>(seeds, "mr", "seeds.mr");
  c.random_seed = get<std::uint64_t>(seeds, "random_baseline", "seeds.random_baseline");
  c.random_count = get_or<std::size_t>(j, "random_count", "random_count", 1000);
  if (c.random_count == 0) fail("random_count", "must be >= 1");
  if (j.contains("fault_tie_seed") && !j["fault_tie_seed"].is_null()) {
    c.fault_tie_seed = get<std::uint64_t>(j, "fault_tie_seed", "fault_tie_seed");
  }
  c.distance_invert = get_or<bool>(j, "distance_invert", "distance_invert", false);

  const json providers = j.value("providers", json::object());
  if (!providers.is_object()) fail("providers", "expected an object");
  c.embedding = provider(providers.value("embedding", json()), "providers.embedding");
  c.sentiment = provider(providers.value("sentiment", json()), "providers.sentiment");
  c.tone = provider(providers.value("tone", json()), "providers.tone");

  if (j.contains("model")) {
    const auto& m = j["model"];
    if (!m.is_object()) fail("model", "expected an object");
    c.model.id = get<std::string>(m, "id", "model.id");
    c.model.base_url = get_or<std::string>(m, "base_url", "model.base_url", "");
    c.model.api_key_env = get_or<std::string>(m, "api_key_env", "model.api_key_env", "");
    try {
      c.model.decoding = executor::DecodingConfig::from_json(m.value("decoding", json::object()));
    } catch (const ValidationError& e) {
      fail("model.decoding", e.what());
    }
    if (m.contains("retry")) {
      const auto& r = m["retry"];
      c.model.retry.max_attempts = get_or<int>(r, "max_attempts", "model.retry.max_attempts", 4);
      c.model.retry.initial_backoff = std::chrono::milliseconds(
          get_or<int>(r, "initial_backoff_ms", "model.retry.initial_backoff_ms", 500));
      c.model.retry.max_backoff = std::chrono::milliseconds(
          get_or<int>(r, "max_backoff_ms", "model.retry.max_backoff_ms", 8000));
      if (c.model.retry.max_attempts < 1) fail("model.retry.max_attempts", "must be >= 1");
    }
    c.model.timeout_seconds = get_or<int>(m, "timeout_seconds", "model.timeout_seconds", 60);
    if (c.model.timeout_seconds < 1) fail("model.timeout_seconds", "must be >= 1");
  }

  if (j.contains("cassette")) {
    const auto& cs = j["cassette"];
    if (!cs.is_object()) fail("cassette", "expected an object");
    fs::path p = get<std::string>(cs, "path", "cassette.path");
    c.cassette_path = p.is_relative() ? base_dir / p : p;
    try {
      c.cassette_mode = executor::parse_cassette_mode(
          get_or<std::string>(cs, "mode", "cassette.mode", "replay"));
    } catch (const ValidationError& e) {
      fail("cassette.mode", e.what());
    }
  }

  if (j.contains("executor")) {
    const auto& e = j["executor"];
    c.execution.max_concurrency =
        get_or<std::size_t>(e, "max_concurrency", "executor.max_concurrency", 4);
    c.execution.max_errored_fraction =
        get_or<double>(e, "max_errored_fraction", "executor.max_errored_fraction", 0.05);
    if (c.execution.max_concurrency < 1) fail("executor.max_concurrency", "must be >= 1");
    if (!(c.execution.max_errored_fraction >= 0.0 && c.execution.max_errored_fraction <= 1.0)) {
      fail("executor.max_errored_fraction", "must lie in [0, 1]");
    }
  }

  fs::path out = get_or<std::string>(j, "output_dir", "output_dir", "out");
  c.output_dir = out.is_relative() ? base_dir / out : out;
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  const std::string text = io::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  const fs::path base = fs::absolute(path).parent_path();
  return from_json(j, base);
}

void RunConfig::override_seeds(std::uint64_t seed) {
  corpus_seed = seed;
  mr_seed = seed;
  random_seed = seed;
}

nlohmann::ordered_json RunConfig::snapshot() const {
  nlohmann::ordered_json j;
  if (corpus_path) j["corpus"] = corpus_path->filename().string();
  if (corpus_template) {
    j["corpus_template"] = {{"template", corpus_template->text},
                            {"slots", corpus_template->slots},
                            {"max_cases", corpus_template->max_cases}};
  }
  j["gazetteer"] = gazetteer_path ? gazetteer_path->filename().string() : "builtin";
  j["mr_templates"] = templates_path ? templates_path->filename().string() : "builtin";
  j["mrs"] = nlohmann::ordered_json::array();
  for (const auto& id : mrs) j["mrs"].push_back(id.str());
  j["seeds"] = {{"corpus", corpus_seed}, {"mr", mr_seed}, {"random_baseline", random_seed}};
  j["random_count"] = random_count;
  j["fault_tie_seed"] = fault_tie_seed ? nlohmann::ordered_json(*fault_tie_seed)
                                       : nlohmann::ordered_json(nullptr);
  j["distance_invert"] = distance_invert;
  const auto prov = [](const ProviderSpec& p) {
    return p.type == "builtin" ? nlohmann::ordered_json("builtin")
                               : nlohmann::ordered_json("remote:" + p.name);
  };
  j["providers"] = {{"embedding", prov(embedding)}, {"sentiment", prov(sentiment)}, {"tone", prov(tone)}};
  if (!model.id.empty()) {
    j["model"] = {{"id", model.id},
                  {"decoding", nlohmann::ordered_json::parse(model.decoding.to_json().dump())}};
  }
  j["cassette_mode"] = std::string(executor::to_string(cassette_mode));
  return j;
}

std::string require_env(const std::string& var, const std::string& field) {
  if (var.empty()) fail(field, "no environment variable configured for the credential");
  const char* v = std::getenv(var.c_str());
  if (v == nullptr || *v == '\0') fail(field, "environment variable " + var + " is not set");
  return v;
}

}  // namespace fairprio::config
