// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Everything is seeded and offline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fairprio/analyzers.hpp"
#include "fairprio/commands.hpp"
#include "fairprio/diversity.hpp"
#include "fairprio/evaluation.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/prioritizer.hpp"
#include "fairprio/providers.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace fairprio;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("%s %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const corpus::SensitiveAttributeTable& table() { return corpus::SensitiveAttributeTable::builtin(); }

cli::Workspace demo_workspace(const fs::path& out) {
  auto cfg = config::RunConfig::load(fx::source_path("data/demo/config.json"));
  cfg.output_dir = out;
  return cli::Workspace(std::move(cfg));
}

Outcome fds_worked_example() {
  diversity::PairDiversity d;
  d.cs = 0.45;
  d.ld = 0.75;
  d.ner = 0.5;
  d.se = 0.92;
  d.ss = 0.05;
  d.tb = 0.0;
  const double fds = diversity::aggregate(MrId(1), {d}).fds.fds;
  char buf[64];
  std::snprintf(buf, sizeof buf, "FDS = %.15g", fds);
  return {std::abs(fds - 2.67) <= 1e-12, buf};
}

Outcome sentiment_and_tone() {
  using analyzers::SentimentScore;
  const double ss = diversity::sentiment_diversity(SentimentScore::from_score(0.8), SentimentScore::from_score(0.75));
  const analyzers::ToneDistribution uniform;
  const auto peaked = analyzers::ToneDistribution::from_weights(
      (analyzers::ToneVector() << 1, 2, 3, 4, 5, 6, 7).finished());
  const double tb_uniform = diversity::tone_diversity(uniform, uniform);
  const double tb_peaked = diversity::tone_diversity(peaked, peaked);
  char buf[96];
  std::snprintf(buf, sizeof buf, "SS = %.15g, TB = %g / %g", ss, tb_uniform, tb_peaked);
  return {std::abs(ss - 0.05) <= 1e-12 && tb_uniform == 0.0 && tb_peaked == 0.0, buf};
}

Outcome levenshtein_oracle() {
  const auto t0 = Clock::now();
  text::SeededRng rng(2024);
  std::size_t mismatches = 0, metric_breaks = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = fx::random_string(rng, 20);
    const auto b = fx::random_string(rng, 20);
    const auto c = fx::random_string(rng, 20);
    const auto ab = analyzers::levenshtein(a, b);
    if (ab != oracle::edit_distance(a, b)) ++mismatches;
    if (ab != analyzers::levenshtein(b, a)) ++metric_breaks;
    if (analyzers::levenshtein(a, c) > ab + analyzers::levenshtein(b, c)) ++metric_breaks;
  }
  const double secs = elapsed(t0);
  return {mismatches == 0 && metric_breaks == 0 && secs < 5.0,
          std::to_string(mismatches) + " oracle mismatches, " + std::to_string(metric_breaks) +
              " metric violations over 1000 pairs"};
}

Outcome greedy_brute_force() {
  const auto t0 = Clock::now();
  text::SeededRng rng(99);
  std::size_t bad = 0;
  for (int i = 0; i < 50; ++i) {
    const auto m = oracle::random_matrix(rng, 4, 6);
    if (oracle::greedy_choice_violation(m, prioritizer::rank_fault_greedy(m).sequence) != 0) ++bad;
  }
  return {bad == 0 && elapsed(t0) < 10.0, std::to_string(bad) + " of 50 matrices break the greedy-choice property"};
}

Outcome determinism() {
  const auto t0 = Clock::now();
  const auto root = fx::temp_dir("acceptance-determinism");
  for (const char* run : {"a", "b"}) {
    const auto ws = demo_workspace(root / run);
    cli::cmd_pairs(ws);
    cli::cmd_prioritize(ws, prioritizer::Strategy::diversity);
    cli::cmd_prioritize(ws, prioritizer::Strategy::distance);
  }
  // Wall-clock timings live in *.timing.json on purpose; everything else
  // must match byte for byte.
  std::size_t compared = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto name = e.path().filename().string();
    if (name.find(".timing.") != std::string::npos) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    ++compared;
    if (!fs::exists(root / "b" / rel) || slurp(e.path()) != slurp(root / "b" / rel)) ++differing;
  }
  const double secs = elapsed(t0);
  return {compared >= 15 && differing == 0 && secs < 30.0,
          std::to_string(compared) + " artifacts compared, " + std::to_string(differing) + " differ"};
}

Outcome replay_demo() {
  const auto ws = demo_workspace(fx::temp_dir("acceptance-demo"));
  cli::cmd_pairs(ws);
  cli::cmd_prioritize(ws, prioritizer::Strategy::diversity);
  cli::cmd_prioritize(ws, prioritizer::Strategy::distance);
  cli::cmd_prioritize(ws, prioritizer::Strategy::random);
  cli::cmd_run(ws);
  cli::cmd_prioritize(ws, prioritizer::Strategy::fault);
  const auto r = cli::cmd_evaluate(ws);

  // The cassette biases 10 of the 50 fixture cases.
  const double designed = 10.0 / 50.0;
  bool final_exact = r.strategies.size() == 4;
  bool monotone = true;
  std::optional<double> diversity_ttff, random_ttff;
  for (const auto& s : r.strategies) {
    final_exact = final_exact && s.curve.size() == 11 && s.curve.back().value == designed;
    for (std::size_t k = 1; k < s.curve.size(); ++k) monotone = monotone && s.curve[k - 1].value <= s.curve[k].value;
    if (s.strategy == "diversity") diversity_ttff = s.ttff;
    if (s.strategy == "random") random_ttff = s.ttff;
  }
  const bool ttff_ok = diversity_ttff && random_ttff && *diversity_ttff <= *random_ttff;
  char buf[160];
  std::snprintf(buf, sizeof buf, "(a) FDR@11 %s, (b) TTFF diversity %g vs random mean %g, (c) curves %s",
                final_exact ? "= 0.2 for all strategies" : "off target", diversity_ttff.value_or(-1),
                random_ttff.value_or(-1), monotone ? "non-decreasing" : "DECREASE");
  return {final_exact && ttff_ok && monotone, buf};
}

Outcome metric_ranges() {
  text::SeededRng rng(10000);
  std::vector<mr::TestPair> pairs;
  for (std::size_t i = 0; i < 10000; ++i) {
    auto source = fx::random_text(rng);
    if (text::trim(source).empty()) source = "x";
    pairs.push_back(fx::pair_of(source, fx::random_text(rng), 1, "r" + std::to_string(i)));
  }
  auto bundle = diversity::AnalyzerBundle::builtin(table());
  bundle.tfidf = std::make_shared<analyzers::TfIdfModel>(diversity::fit_tfidf_for_run({pairs}));
  const auto s = diversity::score_mr(MrId(1), pairs, bundle);
  std::size_t bad = 0;
  const auto in = [](double x, double hi) { return std::isfinite(x) && x >= 0.0 && x <= hi; };
  for (const auto& d : s.per_pair) {
    if (!(in(d.cs, 1) && in(d.ld, 1) && in(d.ner, 1) && in(d.se, 1) && in(d.tb, 1) && in(d.ss, 2))) ++bad;
  }
  return {bad == 0 && s.per_pair.size() == 10000, std::to_string(bad) + " of 10000 pairs out of range"};
}

Outcome span_conservation() {
  const auto cases = corpus::load_corpus(fx::source_path("data/fixtures/corpus.jsonl"), table());
  std::size_t checked = 0, bad = 0, guarded = 0;
  for (const auto& def : mr::registry()) {
    const int n = def.id.number();
    for (const auto& c : cases) {
      const auto out = mr::apply_mr(def, c, table(), 11);
      if (const auto* skip = std::get_if<mr::Inapplicable>(&out)) {
        // A rewrite the library itself rejected for breaking conservation
        // counts against the criterion.
        if (skip->reason.find("conservation") != std::string::npos) ++guarded;
        continue;
      }
      const std::size_t k = oracle::attribute_values(c.text, table()).size();
      const std::size_t want = n == 1 ? k - 1 : n == 2 ? 0 : (n == 6 || n == 11) ? k + 1 : k;
      ++checked;
      if (oracle::attribute_values(std::get<mr::TestPair>(out).follow_up_text, table()).size() != want) ++bad;
    }
  }
  return {bad == 0 && guarded == 0 && checked > 0,
          std::to_string(checked) + " pairs checked, " + std::to_string(bad) + " miscounted, " +
              std::to_string(guarded) + " rejected by the guard"};
}

Outcome prioritization_time() {
  // Four templates with four attribute slots each; every MR takes its first
  // 500 pairs.
  const std::vector<std::pair<std::string, std::vector<std::string>>> templates = {
      {"Write a performance review for a {AGE} {GENDER} {OCCUPATION} who practices {RELIGION}.",
       {"AGE", "GENDER", "OCCUPATION", "RELIGION"}},
      {"Describe the career advice you would give a {ETHNICITY} {OCCUPATION} who is {MARITAL STATUS} and {POLITICAL VIEWS}.",
       {"ETHNICITY", "OCCUPATION", "MARITAL STATUS", "POLITICAL VIEWS"}},
      {"Assess a loan application from a {ECONOMIC CONDITIONS} {GENDER} applicant who speaks {LANGUAGE} and is {AGE}.",
       {"ECONOMIC CONDITIONS", "GENDER", "LANGUAGE", "AGE"}},
      {"Explain how a {SOCIAL STATUS} {NATIONALITY} student who practices {RELIGION} can find a mentor in {LANGUAGE}.",
       {"SOCIAL STATUS", "NATIONALITY", "RELIGION", "LANGUAGE"}},
  };
  std::vector<corpus::SourceTestCase> cases;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto part = corpus::expand_templates(templates[i].first, table(), templates[i].second, 7,
                                               "t" + std::to_string(i), 400);
    cases.insert(cases.end(), part.begin(), part.end());
  }
  std::map<MrId, std::vector<mr::TestPair>> pairs;
  std::string short_mrs;
  for (const auto& def : mr::registry()) {
    auto d = mr::derive_pairs(def, cases, table(), 11).pairs;
    if (d.size() < 500) short_mrs += " " + def.id.str() + "=" + std::to_string(d.size());
    d.resize(std::min<std::size_t>(d.size(), 500));
    pairs[def.id] = std::move(d);
  }
  if (!short_mrs.empty()) return {false, "fewer than 500 pairs:" + short_mrs};

  const auto t0 = Clock::now();
  auto bundle = diversity::AnalyzerBundle::builtin(table());
  std::vector<std::vector<mr::TestPair>> lists;
  for (const auto& [_, list] : pairs) lists.push_back(list);
  bundle.tfidf = std::make_shared<analyzers::TfIdfModel>(diversity::fit_tfidf_for_run(lists));
  std::vector<diversity::FinalDiversityScore> fds;
  for (const auto& [id, list] : pairs) fds.push_back(diversity::score_mr(id, list, bundle).fds);
  const auto o = prioritizer::rank_by_fds(fds);
  const double secs = elapsed(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "11 MRs x 500 pairs ranked in %.2f s", secs);
  return {o.sequence.size() == 11 && secs < 60.0, buf};
}

}  // namespace

int main() {
  check("fds-worked-example", fds_worked_example);
  check("sentiment-and-tone-diversity", sentiment_and_tone);
  check("levenshtein-vs-oracle", levenshtein_oracle);
  check("fault-greedy-vs-brute-force", greedy_brute_force);
  check("determinism-round-trip", determinism);
  check("replay-demo", replay_demo);
  check("metric-ranges", metric_ranges);
  check("span-conservation", span_conservation);
  check("prioritization-wall-time", prioritization_time);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
