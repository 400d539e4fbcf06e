// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/commands.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "fairprio/error.hpp"
#include "fairprio/serialization.hpp"

namespace fairprio::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using prioritizer::Strategy;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path pairs_dir(const Workspace& ws) { return ws.out() / "pairs"; }
fs::path orderings_dir(const Workspace& ws) { return ws.out() / "orderings"; }
fs::path matrix_path(const Workspace& ws) { return ws.out() / "matrix.json"; }

fs::path ordering_path(const Workspace& ws, Strategy s) {
  return orderings_dir(ws) / (std::string(prioritizer::to_string(s)) + ".json");
}
fs::path timing_path(const Workspace& ws, Strategy s) {
  return orderings_dir(ws) / (std::string(prioritizer::to_string(s)) + ".timing.json");
}

// Timing lives in its own file so ordering files stay byte-identical.
void write_timing(const Workspace& ws, Strategy s, double seconds, ordered_json extra = {}) {
  ordered_json j;
  j["strategy"] = std::string(prioritizer::to_string(s));
  j["seconds"] = seconds;
  if (extra.is_object()) {
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  io::write_text(timing_path(ws, s), io::dump(j));
}

std::optional<double> read_timing(const Workspace& ws, Strategy s) {
  const auto p = timing_path(ws, s);
  if (!fs::exists(p)) return std::nullopt;
  try {
    return nlohmann::json::parse(io::read_text(p)).at("seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad timing file " + p.string() + ": " + e.what());
  }
}

std::vector<corpus::SourceTestCase> load_cases(const config::RunConfig& c,
                                               const corpus::SensitiveAttributeTable& table) {
  if (c.corpus_path) return corpus::load_corpus(*c.corpus_path, table);
  const auto& t = *c.corpus_template;
  return corpus::expand_templates(t.text, table, t.slots, c.corpus_seed, t.id_prefix, t.max_cases);
}

std::shared_ptr<executor::HttpTransport> transport_for(const config::RunConfig& c) {
  return executor::make_http_transport(std::chrono::seconds(c.model.timeout_seconds));
}

}  // namespace

Workspace::Workspace(config::RunConfig cfg)
    : cfg_(std::move(cfg)),
      table_(cfg_.gazetteer_path ? corpus::SensitiveAttributeTable::load(*cfg_.gazetteer_path)
                                 : corpus::SensitiveAttributeTable::builtin()),
      templates_(cfg_.templates_path ? mr::MrTemplates::load(cfg_.templates_path->string())
                                     : mr::MrTemplates::builtin()),
      cases_(load_cases(cfg_, table_)) {}

std::vector<mr::DerivedPairs> Workspace::derive() const {
  std::vector<mr::DerivedPairs> out;
  for (const auto& id : cfg_.mrs) {
    out.push_back(mr::derive_pairs(mr::definition(id), cases_, table_, cfg_.mr_seed, templates_));
  }
  return out;
}

std::map<MrId, std::vector<mr::TestPair>> Workspace::pairs() const {
  std::map<MrId, std::vector<mr::TestPair>> out;
  if (fs::exists(pairs_dir(*this))) {
    for (const auto& id : cfg_.mrs) {
      const auto p = pairs_dir(*this) / (id.str() + ".jsonl");
      if (!fs::exists(p)) {
        throw ValidationError("missing " + p.string() + "; rerun `fairprio pairs`");
      }
      auto pairs = io::pairs_from_jsonl(io::read_text(p));
      for (const auto& pair : pairs) {
        if (pair.mr_id != id) throw ValidationError(p.string() + " holds a pair of " + pair.mr_id.str());
      }
      out[id] = std::move(pairs);
    }
    return out;
  }
  for (auto& d : derive()) out[d.mr_id] = std::move(d.pairs);
  return out;
}

std::shared_ptr<executor::Cassette> Workspace::cassette(
    std::optional<executor::CassetteMode> mode) const {
  const auto m = mode.value_or(cfg_.cassette_mode);
  if (!cassette_ || cassette_->mode() != m) {
    cassette_ = cfg_.cassette_path ? std::make_shared<executor::Cassette>(*cfg_.cassette_path, m)
                                   : std::make_shared<executor::Cassette>(m);
  }
  return cassette_;
}

namespace {

analyzers::RemoteClient remote_client(const Workspace& ws, const config::ProviderSpec& p,
                                      const std::string& kind,
                                      std::shared_ptr<executor::HttpTransport>& transport) {
  analyzers::RemoteEndpoint e;
  e.name = p.name;
  e.url = p.url;
  e.retry = ws.config().model.retry;
  if (ws.config().cassette_mode != executor::CassetteMode::replay && !p.token_env.empty()) {
    e.token = config::require_env(p.token_env, "providers." + kind + ".token_env");
  }
  if (!transport) transport = transport_for(ws.config());
  return analyzers::RemoteClient(std::move(e), kind, ws.cassette(), transport);
}

}  // namespace

diversity::AnalyzerBundle Workspace::analyzers() const {
  auto b = diversity::AnalyzerBundle::builtin(table_);
  if (cfg_.embedding.type == "remote") {
    b.embedder = std::make_shared<analyzers::RemoteEmbedder>(
        remote_client(*this, cfg_.embedding, "embedding", transport_));
  }
  b.sentiment = sentiment();
  if (cfg_.tone.type == "remote") {
    b.tone = std::make_shared<analyzers::RemoteTone>(remote_client(*this, cfg_.tone, "tone", transport_));
  }
  return b;
}

std::shared_ptr<const analyzers::SentimentProvider> Workspace::sentiment() const {
  if (cfg_.sentiment.type == "remote") {
    return std::make_shared<analyzers::RemoteSentiment>(
        remote_client(*this, cfg_.sentiment, "sentiment", transport_));
  }
  return std::make_shared<analyzers::LexiconSentiment>();
}

std::vector<MrId> active_mrs(const std::map<MrId, std::vector<mr::TestPair>>& pairs) {
  std::vector<MrId> ids;
  for (const auto& [id, list] : pairs) {
    if (!list.empty()) ids.push_back(id);
  }
  if (ids.empty()) throw ValidationError("no selected MR produced any test pair");
  return ids;
}

std::vector<mr::DerivedPairs> cmd_pairs(const Workspace& ws) {
  auto derived = ws.derive();
  for (const auto& d : derived) {
    io::write_text(pairs_dir(ws) / (d.mr_id.str() + ".jsonl"), io::pairs_to_jsonl(d.pairs));
  }
  io::write_text(pairs_dir(ws) / "skips.json", io::skips_to_json(derived));
  return derived;
}

prioritizer::Ordering cmd_prioritize(const Workspace& ws, Strategy strategy) {
  const auto pairs = ws.pairs();
  const auto t0 = Clock::now();
  switch (strategy) {
    case Strategy::diversity: {
      auto bundle = ws.analyzers();
      std::vector<std::vector<mr::TestPair>> lists;
      for (const auto& [_, list] : pairs) lists.push_back(list);
      bundle.tfidf = std::make_shared<analyzers::TfIdfModel>(diversity::fit_tfidf_for_run(lists));
      std::vector<diversity::MrScore> scores;
      std::vector<diversity::FinalDiversityScore> fds;
      std::vector<std::string> warnings;
      for (const auto& [id, list] : pairs) {
        if (list.empty()) {
          warnings.push_back(id.str() + " has no test pairs and was excluded");
          continue;
        }
        scores.push_back(diversity::score_mr(id, list, bundle));
        fds.push_back(scores.back().fds);
      }
      if (fds.empty()) throw ValidationError("no selected MR produced any test pair");
      auto o = prioritizer::rank_by_fds(fds);
      o.warnings = std::move(warnings);
      const double secs = seconds_since(t0);
      io::write_text(ordering_path(ws, strategy), io::dump(io::ordering_to_json(o)));
      io::write_text(orderings_dir(ws) / "diversity.scores.json", io::dump(io::scores_to_json(scores)));
      write_timing(ws, strategy, secs);
      return o;
    }
    case Strategy::distance: {
      auto o = prioritizer::rank_by_distance(pairs, ws.config().distance_invert);
      const double secs = seconds_since(t0);
      io::write_text(ordering_path(ws, strategy), io::dump(io::ordering_to_json(o)));
      write_timing(ws, strategy, secs);
      return o;
    }
    case Strategy::fault: {
      if (!fs::exists(matrix_path(ws))) {
        throw ValidationError("fault-based prioritization needs an outcome matrix at " +
                              matrix_path(ws).string() + "; run `fairprio run` first");
      }
      const auto matrix = io::matrix_from_json(nlohmann::json::parse(io::read_text(matrix_path(ws))));
      auto o = prioritizer::rank_fault_greedy(matrix, ws.config().fault_tie_seed);
      const double ranking = seconds_since(t0);
      // The greedy ranking is only possible after executing every pair, so
      // the execution time counts towards its cost.
      double execution = 0.0;
      const auto mt = ws.out() / "matrix.timing.json";
      if (fs::exists(mt)) execution = nlohmann::json::parse(io::read_text(mt)).value("seconds", 0.0);
      io::write_text(ordering_path(ws, strategy), io::dump(io::ordering_to_json(o)));
      write_timing(ws, strategy, ranking + execution,
                   {{"ranking_seconds", ranking}, {"execution_seconds", execution}});
      return o;
    }
    case Strategy::random: {
      auto set = prioritizer::random_orderings(active_mrs(pairs), ws.config().random_count,
                                               ws.config().random_seed);
      const double secs = seconds_since(t0);
      io::write_text(ordering_path(ws, strategy), io::dump(io::random_orderings_to_json(set)));
      write_timing(ws, strategy, secs);
      return set.front();
    }
  }
  throw ValidationError("unknown strategy");
}

executor::ExecutionReport cmd_run(const Workspace& ws, std::optional<executor::CassetteMode> mode) {
  const auto& c = ws.config();
  const auto m = mode.value_or(c.cassette_mode);
  if (c.model.id.empty()) throw ValidationError("config field 'model': required by `run`");
  if (!c.cassette_path && m != executor::CassetteMode::live) {
    throw ValidationError("config field 'cassette': required for record and replay modes");
  }
  executor::ModelEndpoint endpoint{c.model.id, c.model.base_url, "", c.model.retry};
  std::shared_ptr<executor::HttpTransport> transport;
  if (m != executor::CassetteMode::replay) {
    if (c.model.base_url.empty()) throw ValidationError("config field 'model.base_url': required");
    endpoint.api_key = config::require_env(c.model.api_key_env, "model.api_key_env");
    transport = transport_for(c);
  }
  auto all_pairs = ws.pairs();
  std::map<MrId, std::vector<mr::TestPair>> pairs;
  for (const auto& id : active_mrs(all_pairs)) pairs[id] = std::move(all_pairs[id]);

  std::vector<std::string> case_ids;
  for (const auto& sc : ws.cases()) case_ids.push_back(sc.id);
  const executor::ChatClient client(endpoint, c.model.decoding, ws.cassette(m), transport);
  const auto sentiment = ws.sentiment();

  const auto t0 = Clock::now();
  auto report = executor::build_outcome_matrix(case_ids, pairs, client, *sentiment, c.execution);
  const double secs = seconds_since(t0);
  io::write_text(matrix_path(ws), io::dump(io::matrix_to_json(report.matrix)));
  ordered_json timing = {{"seconds", secs}, {"mode", std::string(executor::to_string(m))}};
  io::write_text(ws.out() / "matrix.timing.json", io::dump(timing));
  return report;
}

evaluation::EvalReport cmd_evaluate(const Workspace& ws) {
  if (!fs::exists(matrix_path(ws))) {
    throw ValidationError("no outcome matrix at " + matrix_path(ws).string() +
                          "; run `fairprio run` first");
  }
  const auto matrix = io::matrix_from_json(nlohmann::json::parse(io::read_text(matrix_path(ws))));
  std::vector<prioritizer::Ordering> orderings;
  std::vector<prioritizer::Ordering> random_set;
  std::map<std::string, double> timings;
  for (const auto s : {Strategy::diversity, Strategy::distance, Strategy::fault, Strategy::random}) {
    const auto p = ordering_path(ws, s);
    if (!fs::exists(p)) continue;
    const auto j = nlohmann::json::parse(io::read_text(p));
    if (s == Strategy::random) {
      random_set = io::random_orderings_from_json(j);
    } else {
      orderings.push_back(io::ordering_from_json(j));
    }
    if (const auto t = read_timing(ws, s)) timings[std::string(prioritizer::to_string(s))] = *t;
  }
  if (orderings.empty() && random_set.empty()) {
    throw ValidationError("no orderings under " + orderings_dir(ws).string() +
                          "; run `fairprio prioritize` first");
  }
  auto report = evaluation::compare_strategies(matrix, orderings, random_set, timings);
  report.metadata = nlohmann::json::parse(ws.config().snapshot().dump());
  io::write_text(ws.out() / "report" / "report.json", io::dump(report.to_json()));
  io::write_text(ws.out() / "report" / "curves.csv", report.curves_csv());
  io::write_text(ws.out() / "report" / "summary.csv", report.summary_csv());
  return report;
}

std::string cmd_report(const Workspace& ws) {
  const auto p = ws.out() / "report" / "report.json";
  if (!fs::exists(p)) throw ValidationError("no report at " + p.string() + "; run `fairprio evaluate` first");
  const auto j = nlohmann::ordered_json::parse(io::read_text(p));
  std::string out;
  char buf[256];
  out += "cases: " + std::to_string(j.at("n_cases").get<std::size_t>()) + "\n\n";
  out += "MR     FDR     violations/applicable\n";
  for (const auto& [id, f] : j.at("per_mr_fdr").items()) {
    std::snprintf(buf, sizeof buf, "%-6s %.4f  %zu/%zu\n", id.c_str(), f.at("fdr").get<double>(),
                  f.at("violations").get<std::size_t>(), f.at("applicable").get<std::size_t>());
    out += buf;
  }
  out += "\nstrategy   TTFF      seconds   cumulative FDR by k\n";
  for (const auto& s : j.at("strategies")) {
    const auto fmt = [](const nlohmann::ordered_json& v, const char* spec, const char* none) {
      if (v.is_null()) return std::string(none);
      char b[32];
      std::snprintf(b, sizeof b, spec, v.get<double>());
      return std::string(b);
    };
    const std::string ttff = fmt(s.at("ttff"), "%.3f", "none");
    const std::string secs = fmt(s.at("prioritization_seconds"), "%.4f", "-");
    std::snprintf(buf, sizeof buf, "%-10s %-9s %-9s", s.at("strategy").get<std::string>().c_str(),
                  ttff.c_str(), secs.c_str());
    out += buf;
    for (const auto& pt : s.at("curve")) {
      std::snprintf(buf, sizeof buf, " %.3f", pt.at("cumulative_fdr").get<double>());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

int main(int argc, char** argv) {
  CLI::App app{"Prioritize metamorphic relations for LLM fairness testing"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Overrides the corpus, MR and random-baseline seeds");

  auto* pairs = app.add_subcommand("pairs", "Derive test pairs for the selected MRs");
  auto* prioritize = app.add_subcommand("prioritize", "Order MRs under one strategy");
  std::string strategy;
  prioritize->add_option("--strategy", strategy, "diversity, distance, fault or random")
      ->required()
      ->check(CLI::IsMember({"diversity", "distance", "fault", "random"}));
  auto* run = app.add_subcommand("run", "Execute pairs against the model and build the matrix");
  std::string mode;
  run->add_option("--mode", mode, "record, replay or live (overrides config)")
      ->check(CLI::IsMember({"record", "replay", "live"}));
  auto* evaluate = app.add_subcommand("evaluate", "Compute FDR curves and TTFF per strategy");
  auto* report = app.add_subcommand("report", "Print the evaluation report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto cfg = config::RunConfig::load(config_path);
    if (!out_dir.empty()) cfg.output_dir = fs::absolute(out_dir);
    if (seed) cfg.override_seeds(*seed);
    const Workspace ws(std::move(cfg));

    if (*pairs) {
      const auto derived = cmd_pairs(ws);
      for (const auto& d : derived) {
        std::cerr << d.mr_id.str() << ": " << d.pairs.size() << " pairs, " << d.skipped.size()
                  << " skipped\n";
      }
    } else if (*prioritize) {
      const auto o = cmd_prioritize(ws, prioritizer::parse_strategy(strategy));
      for (const auto& w : o.warnings) std::cerr << "warning: " << w << "\n";
      std::string seq;
      for (const auto& id : o.sequence) seq += (seq.empty() ? "" : " ") + id.str();
      std::cout << strategy << ": " << seq << (o.strategy == Strategy::random ? " (first of set)" : "")
                << "\n";
    } else if (*run) {
      std::optional<executor::CassetteMode> m;
      if (!mode.empty()) m = executor::parse_cassette_mode(mode);
      const auto r = cmd_run(ws, m);
      std::cerr << r.evaluated << " pairs evaluated, " << r.errors.size() << " errored\n";
      for (const auto& e : r.errors) std::cerr << "  " << e << "\n";
    } else if (*evaluate) {
      const auto r = cmd_evaluate(ws);
      std::cout << r.summary_csv();
    } else if (*report) {
      std::cout << cmd_report(ws);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::parse: return 1;
      case ErrorKind::replay_miss: return 3;
      case ErrorKind::transport:
      case ErrorKind::execution: return 2;
    }
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fairprio::cli
