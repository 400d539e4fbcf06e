// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/evaluation.hpp"

#include <charconv>
#include <cstdio>
#include <set>

#include "fairprio/error.hpp"

namespace fairprio::evaluation {

using prioritizer::OutcomeMatrix;

namespace {

void require_permutation(const OutcomeMatrix& matrix, const std::vector<MrId>& sequence) {
  if (!prioritizer::is_permutation_of(sequence, matrix.mr_ids())) {
    std::string ids;
    for (const auto& id : sequence) ids += (ids.empty() ? "" : ",") + id.str();
    throw ValidationError("ordering [" + ids + "] is not a permutation of the matrix MRs");
  }
}

// Shortest text that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::map<MrId, MrFdr> fdr_per_mr(const OutcomeMatrix& matrix) {
  std::map<MrId, MrFdr> out;
  for (std::size_t r = 0; r < matrix.n_mrs(); ++r) {
    MrFdr f;
    for (std::size_t c = 0; c < matrix.n_cases(); ++c) {
      f.applicable += matrix.applicable(r, c) ? 1 : 0;
      f.violations += matrix.violation(r, c) ? 1 : 0;
    }
    f.fdr = f.applicable == 0 ? 0.0
                              : static_cast<double>(f.violations) / static_cast<double>(f.applicable);
    out[matrix.mr_ids()[r]] = f;
  }
  return out;
}

namespace {

// Distinct violated cases after each prefix of `sequence`.
std::vector<std::size_t> covered_counts(const OutcomeMatrix& matrix, const std::vector<MrId>& sequence) {
  require_permutation(matrix, sequence);
  std::vector<bool> covered(matrix.n_cases(), false);
  std::size_t n_covered = 0;
  std::vector<std::size_t> counts;
  for (const auto& id : sequence) {
    for (std::size_t c : matrix.faults(matrix.row_of(id))) {
      if (!covered[c]) {
        covered[c] = true;
        ++n_covered;
      }
    }
    counts.push_back(n_covered);
  }
  return counts;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<CurvePoint> cumulative_fdr(const OutcomeMatrix& matrix, const std::vector<MrId>& sequence) {
  const auto counts = covered_counts(matrix, sequence);
  std::vector<CurvePoint> curve;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    curve.push_back({k + 1, sequence[k], ratio(counts[k], matrix.n_cases())});
  }
  return curve;
}

std::optional<std::size_t> ttff(const OutcomeMatrix& matrix, const std::vector<MrId>& sequence) {
  require_permutation(matrix, sequence);
  std::size_t count = 0;
  for (const auto& id : sequence) {
    const std::size_t r = matrix.row_of(id);
    for (std::size_t c = 0; c < matrix.n_cases(); ++c) {
      if (!matrix.applicable(r, c)) continue;
      ++count;
      if (matrix.violation(r, c)) return count;
    }
  }
  return std::nullopt;
}

EvalReport compare_strategies(const OutcomeMatrix& matrix,
                              const std::vector<prioritizer::Ordering>& orderings,
                              const std::vector<prioritizer::Ordering>& random_set,
                              const std::map<std::string, double>& timings) {
  EvalReport report;
  report.per_mr_fdr = fdr_per_mr(matrix);
  report.n_cases = matrix.n_cases();
  const auto seconds = [&](const std::string& name) -> std::optional<double> {
    const auto it = timings.find(name);
    if (it == timings.end()) return std::nullopt;
    return it->second;
  };

  for (const auto& o : orderings) {
    StrategyResult s;
    s.strategy = std::string(prioritizer::to_string(o.strategy));
    s.curve = cumulative_fdr(matrix, o.sequence);
    if (const auto t = ttff(matrix, o.sequence)) s.ttff = static_cast<double>(*t);
    s.prioritization_seconds = seconds(s.strategy);
    report.strategies.push_back(std::move(s));
  }

  if (!random_set.empty()) {
    StrategyResult s;
    s.strategy = "random";
    s.n_orderings = random_set.size();
    // Integer sums keep the mean exact when every ordering agrees.
    std::vector<std::size_t> sums(matrix.n_mrs(), 0);
    double ttff_sum = 0.0;
    std::size_t ttff_n = 0;
    for (const auto& o : random_set) {
      const auto counts = covered_counts(matrix, o.sequence);
      for (std::size_t k = 0; k < counts.size(); ++k) sums[k] += counts[k];
      if (const auto t = ttff(matrix, o.sequence)) {
        ttff_sum += static_cast<double>(*t);
        ++ttff_n;
      }
    }
    for (std::size_t k = 0; k < sums.size(); ++k) {
      s.curve.push_back({k + 1, MrId{}, ratio(sums[k], random_set.size() * matrix.n_cases())});
    }
    // Every permutation covers the same MRs, so either all or none have a
    // first failure.
    if (ttff_n > 0) s.ttff = ttff_sum / static_cast<double>(ttff_n);
    s.prioritization_seconds = seconds("random");
    report.strategies.push_back(std::move(s));
  }
  return report;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["n_cases"] = n_cases;
  j["cumulative_fdr_definition"] =
      "distinct source cases with at least one violation among the first k MRs, "
      "divided by the number of source cases";
  auto& fdr = j["per_mr_fdr"];
  fdr = nlohmann::ordered_json::object();
  for (const auto& [id, f] : per_mr_fdr) {
    fdr[id.str()] = {{"fdr", f.fdr}, {"violations", f.violations}, {"applicable", f.applicable}};
    if (f.applicable == 0) fdr[id.str()]["flag"] = "no applicable pairs";
  }
  auto& strategies_j = j["strategies"];
  strategies_j = nlohmann::ordered_json::array();
  for (const auto& s : strategies) {
    nlohmann::ordered_json e;
    e["strategy"] = s.strategy;
    e["n_orderings"] = s.n_orderings;
    e["ttff"] = s.ttff ? nlohmann::ordered_json(*s.ttff) : nlohmann::ordered_json(nullptr);
    e["prioritization_seconds"] = s.prioritization_seconds
                                      ? nlohmann::ordered_json(*s.prioritization_seconds)
                                      : nlohmann::ordered_json(nullptr);
    auto& curve = e["curve"];
    curve = nlohmann::ordered_json::array();
    for (const auto& p : s.curve) {
      nlohmann::ordered_json point = {{"k", p.k}};
      if (p.mr_id.number() != 0) point["mr_id"] = p.mr_id.str();
      point["cumulative_fdr"] = p.value;
      curve.push_back(point);
    }
    strategies_j.push_back(e);
  }
  j["metadata"] = nlohmann::ordered_json::parse(metadata.dump());
  return j;
}

std::string EvalReport::curves_csv() const {
  std::string out = "strategy,k,mr_id,cumulative_fdr\n";
  for (const auto& s : strategies) {
    for (const auto& p : s.curve) {
      out += s.strategy + "," + std::to_string(p.k) + "," +
             (p.mr_id.number() != 0 ? p.mr_id.str() : std::string()) + "," + fmt(p.value) + "\n";
    }
  }
  return out;
}

std::string EvalReport::summary_csv() const {
  std::string out = "strategy,ttff,prioritization_seconds\n";
  for (const auto& s : strategies) {
    out += s.strategy + "," + (s.ttff ? fmt(*s.ttff) : std::string("none")) + "," +
           (s.prioritization_seconds ? fmt_fixed(*s.prioritization_seconds) : std::string()) + "\n";
  }
  return out;
}

}  // namespace fairprio::evaluation
