// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

// Writes the replay cassette of a stub "biased model". Every source prompt
// gets a positive answer. For the designed cases (every fifth case in corpus
// order) a follow-up whose GENDER or ETHNICITY entities differ from its
// source gets a negative answer; all other follow-ups stay positive.

#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "fairprio/analyzers.hpp"
#include "fairprio/commands.hpp"
#include "fairprio/error.hpp"
#include "fairprio/serialization.hpp"

using namespace fairprio;

namespace {

constexpr const char* kPositive =
    "Happy to help. Here is a clear and supportive answer with good, practical suggestions.";
constexpr const char* kNegative =
    "This looks like a bad fit. The prospects are poor and the outcome would likely be wrong.";

analyzers::EntitySet biased_entities(const std::string& s, const corpus::SensitiveAttributeTable& t) {
  analyzers::EntitySet out;
  for (const auto& e : analyzers::extract_entities(s, t)) {
    if (e.category == "GENDER" || e.category == "ETHNICITY") out.insert(e);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the biased-stub demo cassette"};
  std::string config_path;
  std::string out_path;
  std::size_t period = 5;
  app.add_option("--config", config_path, "Demo run config")->required();
  app.add_option("--out", out_path, "Cassette file to write (default: the config's cassette path)");
  app.add_option("--period", period, "Every n-th case is biased")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config::RunConfig::load(config_path);
    if (out_path.empty()) {
      if (!cfg.cassette_path) throw ValidationError("config has no cassette path; pass --out");
      out_path = cfg.cassette_path->string();
    }
    const cli::Workspace ws(cfg);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ws.cases().size(); ++i) index[ws.cases()[i].id] = i;

    const executor::ChatClient client({cfg.model.id, "", "", {}}, cfg.model.decoding,
                                      std::make_shared<executor::Cassette>(executor::CassetteMode::replay),
                                      nullptr);
    std::map<std::string, std::string> answers;  // prompt -> content
    std::set<std::string> biased_cases;
    const auto assign = [&](const std::string& prompt, const std::string& content) {
      const auto [it, inserted] = answers.emplace(prompt, content);
      if (!inserted && it->second != content) {
        throw ValidationError("prompt needs two different answers: " + prompt);
      }
    };

    std::size_t violations = 0;
    for (const auto& d : ws.derive()) {
      for (const auto& p : d.pairs) {
        assign(p.source.text, kPositive);
        const bool designed = index.at(p.source.id) % period == period - 1;
        const bool changed = biased_entities(p.source.text, ws.table()) !=
                             biased_entities(p.follow_up_text, ws.table());
        if (designed && changed) {
          assign(p.follow_up_text, kNegative);
          biased_cases.insert(p.source.id);
          ++violations;
        } else {
          assign(p.follow_up_text, kPositive);
        }
      }
    }

    executor::Cassette cassette(executor::CassetteMode::record);
    for (const auto& [prompt, content] : answers) {
      cassette.put(client.key_request(prompt), executor::make_chat_body(cfg.model.id, content));
    }
    io::write_text(out_path, cassette.serialize());
    std::cerr << "wrote " << answers.size() << " responses to " << out_path << "; "
              << biased_cases.size() << " of " << ws.cases().size() << " cases biased, "
              << violations << " violating pairs\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
