// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/serialization.hpp"

#include <fstream>
#include <sstream>

#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio::io {

using nlohmann::ordered_json;
using prioritizer::Cell;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string pairs_to_jsonl(const std::vector<mr::TestPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    ordered_json rec;
    rec["mr_id"] = p.mr_id.str();
    rec["case_id"] = p.source.id;
    rec["source"] = p.source.text;
    rec["source_attributes"] = ordered_json::array();
    for (const auto& a : p.source.attributes) {
      rec["source_attributes"].push_back(
          {{"category", a.category}, {"value", a.value}, {"start", a.start}, {"end", a.end}});
    }
    rec["follow_up"] = p.follow_up_text;
    rec["note"] = p.transform_note;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<mr::TestPair> pairs_from_jsonl(std::string_view jsonl) {
  std::vector<mr::TestPair> pairs;
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      mr::TestPair p;
      p.mr_id = MrId::parse(rec.at("mr_id").get<std::string>());
      p.source.id = rec.at("case_id").get<std::string>();
      p.source.text = rec.at("source").get<std::string>();
      for (const auto& a : rec.at("source_attributes")) {
        p.source.attributes.push_back({a.at("category").get<std::string>(),
                                       a.at("value").get<std::string>(),
                                       a.at("start").get<std::size_t>(),
                                       a.at("end").get<std::size_t>()});
      }
      p.follow_up_text = rec.at("follow_up").get<std::string>();
      p.transform_note = rec.value("note", std::string());
      pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad pair record: ") + e.what(), line_no);
    }
  }
  return pairs;
}

std::string skips_to_json(const std::vector<mr::DerivedPairs>& derived) {
  ordered_json j = ordered_json::object();
  for (const auto& d : derived) {
    auto& list = j[d.mr_id.str()];
    list = ordered_json::array();
    for (const auto& s : d.skipped) list.push_back({{"case_id", s.case_id}, {"reason", s.reason}});
  }
  return dump(j);
}

ordered_json ordering_to_json(const prioritizer::Ordering& o) {
  ordered_json j;
  j["strategy"] = std::string(prioritizer::to_string(o.strategy));
  j["sequence"] = ordered_json::array();
  for (const auto& id : o.sequence) j["sequence"].push_back(id.str());
  // Scores follow the sequence order so the file reads top-down.
  j["scores"] = ordered_json::object();
  for (const auto& id : o.sequence) {
    if (const auto it = o.scores.find(id); it != o.scores.end()) j["scores"][id.str()] = it->second;
  }
  j["seed"] = o.seed ? ordered_json(*o.seed) : ordered_json(nullptr);
  if (!o.warnings.empty()) j["warnings"] = o.warnings;
  return j;
}

prioritizer::Ordering ordering_from_json(const nlohmann::json& j) {
  prioritizer::Ordering o;
  try {
    o.strategy = prioritizer::parse_strategy(j.at("strategy").get<std::string>());
    for (const auto& id : j.at("sequence")) o.sequence.push_back(MrId::parse(id.get<std::string>()));
    if (j.contains("scores")) {
      for (const auto& [k, v] : j["scores"].items()) o.scores[MrId::parse(k)] = v.get<double>();
    }
    if (j.contains("seed") && !j["seed"].is_null()) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("warnings")) o.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad ordering file: ") + e.what());
  }
  if (!prioritizer::is_permutation_of(o.sequence, o.sequence)) {
    throw ValidationError("ordering sequence has duplicate MR ids");
  }
  return o;
}

ordered_json random_orderings_to_json(const std::vector<prioritizer::Ordering>& set) {
  ordered_json j;
  j["strategy"] = "random";
  j["seed"] = (!set.empty() && set.front().seed) ? ordered_json(*set.front().seed)
                                                  : ordered_json(nullptr);
  j["count"] = set.size();
  j["orderings"] = ordered_json::array();
  for (const auto& o : set) {
    ordered_json seq = ordered_json::array();
    for (const auto& id : o.sequence) seq.push_back(id.str());
    j["orderings"].push_back(std::move(seq));
  }
  return j;
}

std::vector<prioritizer::Ordering> random_orderings_from_json(const nlohmann::json& j) {
  std::vector<prioritizer::Ordering> out;
  try {
    std::optional<std::uint64_t> seed;
    if (!j.at("seed").is_null()) seed = j["seed"].get<std::uint64_t>();
    for (const auto& seq : j.at("orderings")) {
      prioritizer::Ordering o;
      o.strategy = prioritizer::Strategy::random;
      o.seed = seed;
      for (const auto& id : seq) o.sequence.push_back(MrId::parse(id.get<std::string>()));
      out.push_back(std::move(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad random orderings file: ") + e.what());
  }
  if (out.empty()) throw ValidationError("random orderings file holds no orderings");
  return out;
}

namespace {

char cell_char(Cell c) {
  switch (c) {
    case Cell::pass: return 'P';
    case Cell::violation: return 'V';
    case Cell::skipped: return 'S';
    case Cell::errored: return 'E';
  }
  return '?';
}

Cell char_cell(char ch) {
  switch (ch) {
    case 'P': return Cell::pass;
    case 'V': return Cell::violation;
    case 'S': return Cell::skipped;
    case 'E': return Cell::errored;
    default: throw ValidationError(std::string("bad matrix cell '") + ch + "'");
  }
}

}  // namespace

ordered_json matrix_to_json(const prioritizer::OutcomeMatrix& m) {
  ordered_json j;
  j["legend"] = "P pass, V violation, S skipped, E errored";
  j["mr_ids"] = ordered_json::array();
  for (const auto& id : m.mr_ids()) j["mr_ids"].push_back(id.str());
  j["case_ids"] = m.case_ids();
  j["rows"] = ordered_json::array();
  for (std::size_t r = 0; r < m.n_mrs(); ++r) {
    std::string row(m.n_cases(), ' ');
    for (std::size_t c = 0; c < m.n_cases(); ++c) row[c] = cell_char(m.at(r, c));
    j["rows"].push_back(row);
  }
  return j;
}

prioritizer::OutcomeMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    std::vector<MrId> ids;
    for (const auto& id : j.at("mr_ids")) ids.push_back(MrId::parse(id.get<std::string>()));
    auto cases = j.at("case_ids").get<std::vector<std::string>>();
    const auto& rows = j.at("rows");
    if (rows.size() != ids.size()) throw ValidationError("matrix has " + std::to_string(rows.size()) +
                                                         " rows for " + std::to_string(ids.size()) +
                                                         " MR ids");
    prioritizer::OutcomeMatrix m(ids, cases);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto row = rows[r].get<std::string>();
      if (row.size() != m.n_cases()) {
        throw ValidationError("matrix row " + ids[r].str() + " has " + std::to_string(row.size()) +
                              " cells for " + std::to_string(m.n_cases()) + " cases");
      }
      for (std::size_t c = 0; c < row.size(); ++c) m.set(r, c, char_cell(row[c]));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad matrix file: ") + e.what());
  }
}

ordered_json scores_to_json(const std::vector<diversity::MrScore>& scores) {
  ordered_json j = ordered_json::array();
  for (const auto& s : scores) {
    const auto& b = s.breakdown;
    ordered_json e;
    e["mr_id"] = b.mr_id.str();
    e["n_pairs"] = b.n_pairs;
    e["cs"] = b.cs_mr;
    e["ld"] = b.ld_mr;
    e["ner"] = b.ner_mr;
    e["se"] = b.se_mr;
    e["ss"] = b.ss_mr;
    e["tb"] = b.tb_mr;
    e["fds"] = s.fds.fds;
    if (!b.warnings.empty()) e["warnings"] = b.warnings;
    e["pairs"] = ordered_json::array();
    for (const auto& p : s.per_pair) {
      e["pairs"].push_back({{"pair_index", p.pair_index}, {"cs", p.cs}, {"ld", p.ld},
                            {"ner", p.ner}, {"se", p.se}, {"ss", p.ss}, {"tb", p.tb}});
    }
    j.push_back(std::move(e));
  }
  return j;
}

}  // namespace fairprio::io
