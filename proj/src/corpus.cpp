// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fairprio/embedded.hpp"
#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

std::map<std::string, std::string> default_contrast(
    const std::vector<std::string>& values) {
  std::map<std::string, std::string> out;
  const std::size_t n = values.size();
  if (n % 2 == 0) {
    for (std::size_t i = 0; i < n; i += 2) {
      out[values[i]] = values[i + 1];
      out[values[i + 1]] = values[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out[values[i]] = values[(i + 1) % n];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool starts_with_vowel_sound(std::string_view word) {
  const std::string w = text::casefold(word);
  if (w.empty()) return false;
  static const char* const vowel_h[] = {"hour", "honest", "honor", "heir"};
  for (const char* p : vowel_h) {
    if (w.rfind(p, 0) == 0) return true;
  }
  static const char* const consonant_v[] = {"uni", "use", "usu", "eu", "one", "once"};
  for (const char* p : consonant_v) {
    if (w.rfind(p, 0) == 0) return false;
  }
  return std::string_view("aeiou").find(w[0]) != std::string_view::npos;
}

std::string slug(std::string_view s) {
  std::string out;
  bool dash = false;
  for (char c : s) {
    if (text::is_word_char(c)) {
      out.push_back(text::lower(c));
      dash = false;
    } else if (!dash && !out.empty()) {
      out.push_back('-');
      dash = true;
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

}  // namespace

SensitiveAttributeTable::SensitiveAttributeTable(
    std::vector<Category> categories, std::map<std::string, std::string> contrast)
    : categories_(std::move(categories)) {
  if (categories_.empty()) throw ValidationError("gazetteer has no categories");
  std::set<std::string> names;
  for (const auto& [name, values] : categories_) {
    if (name.empty()) throw ValidationError("gazetteer category with empty name");
    if (!names.insert(name).second) {
      throw ValidationError("duplicate gazetteer category " + name);
    }
    if (values.size() < 2) {
      throw ValidationError("gazetteer category " + name + " needs at least 2 values");
    }
    for (const auto& v : values) {
      if (text::trim(v) != v || v.empty()) {
        throw ValidationError("gazetteer value '" + v + "' in " + name +
                              " is empty or has surrounding whitespace");
      }
      if (!text::is_word_char(v.front()) || !text::is_word_char(v.back())) {
        throw ValidationError("gazetteer value '" + v + "' in " + name +
                              " must start and end with a letter or digit");
      }
      const std::string folded = text::casefold(v);
      if (category_.count(folded) != 0) {
        throw ValidationError("gazetteer value '" + v + "' is not unique");
      }
      category_[folded] = name;
      canonical_[folded] = v;
      by_length_.emplace_back(v, name);
    }
  }

  // Resolve the contrast map category by category.
  std::map<std::string, std::string> given;
  for (const auto& [k, v] : contrast) {
    const auto kc = canonical(k);
    const auto vc = canonical(v);
    if (!kc || !vc) {
      throw ValidationError("contrast entry " + k + " -> " + v + " names an unknown value");
    }
    given[*kc] = *vc;
  }
  for (const auto& [name, values] : categories_) {
    std::size_t covered = 0;
    for (const auto& v : values) covered += given.count(v);
    std::map<std::string, std::string> pairing;
    if (covered == 0) {
      pairing = default_contrast(values);
    } else if (covered == values.size()) {
      for (const auto& v : values) pairing[v] = given.at(v);
    } else {
      throw ValidationError("contrast map covers only part of category " + name);
    }
    std::set<std::string> images;
    for (const auto& v : values) {
      const std::string& c = pairing.at(v);
      if (*category_of(c) != name) {
        throw ValidationError("contrast of " + v + " leaves category " + name);
      }
      if (text::iequals(c, v)) throw ValidationError("value " + v + " contrasts with itself");
      images.insert(c);
      if (values.size() % 2 == 0 && !text::iequals(pairing.at(c), v)) {
        throw ValidationError("contrast map is not an involution in category " + name);
      }
    }
    if (images.size() != values.size()) {
      throw ValidationError("contrast map is not a bijection in category " + name);
    }
    for (const auto& [k, v] : pairing) contrast_[text::casefold(k)] = v;
  }

  std::stable_sort(by_length_.begin(), by_length_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

const SensitiveAttributeTable& SensitiveAttributeTable::builtin() {
  static const SensitiveAttributeTable table =
      from_json(detail::embedded_file("gazetteer.json"));
  return table;
}

SensitiveAttributeTable SensitiveAttributeTable::from_json(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gazetteer: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ValidationError("gazetteer must be a JSON object");
  std::vector<Category> cats;
  std::map<std::string, std::string> contrast;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") continue;
    if (key == "contrast") {
      if (!value.is_object()) throw ValidationError("gazetteer 'contrast' must be an object");
      for (const auto& [k, v] : value.items()) {
        if (!v.is_string()) throw ValidationError("contrast of " + k + " must be a string");
        contrast[k] = v.get<std::string>();
      }
      continue;
    }
    if (!value.is_array()) throw ValidationError("gazetteer category " + key + " must be an array");
    std::vector<std::string> values;
    for (const auto& v : value) {
      if (!v.is_string()) throw ValidationError("gazetteer category " + key + " has a non-string value");
      values.push_back(v.get<std::string>());
    }
    cats.emplace_back(key, std::move(values));
  }
  return SensitiveAttributeTable(std::move(cats), std::move(contrast));
}

SensitiveAttributeTable SensitiveAttributeTable::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

std::string SensitiveAttributeTable::to_json() const {
  ordered_json doc = ordered_json::object();
  for (const auto& [name, values] : categories_) doc[name] = values;
  ordered_json c = ordered_json::object();
  for (const auto& [name, values] : categories_) {
    for (const auto& v : values) c[v] = contrast(v);
  }
  doc["contrast"] = c;
  return doc.dump(2);
}

bool SensitiveAttributeTable::has_category(std::string_view name) const {
  return std::any_of(categories_.begin(), categories_.end(),
                     [&](const Category& c) { return c.first == name; });
}

const std::vector<std::string>& SensitiveAttributeTable::values(std::string_view category) const {
  for (const auto& c : categories_) {
    if (c.first == category) return c.second;
  }
  throw ValidationError("unknown gazetteer category " + std::string(category));
}

std::optional<std::string> SensitiveAttributeTable::category_of(std::string_view value) const {
  const auto it = category_.find(text::casefold(value));
  if (it == category_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> SensitiveAttributeTable::canonical(std::string_view value) const {
  const auto it = canonical_.find(text::casefold(value));
  if (it == canonical_.end()) return std::nullopt;
  return it->second;
}

const std::string& SensitiveAttributeTable::contrast(std::string_view value) const {
  const auto it = contrast_.find(text::casefold(value));
  if (it == contrast_.end()) {
    throw ValidationError("no contrast for unknown value " + std::string(value));
  }
  return it->second;
}

std::vector<AttributeSpan> annotate_attributes(std::string_view s,
                                               const SensitiveAttributeTable& table) {
  std::vector<AttributeSpan> spans;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (!text::is_word_char(s[i]) || (i > 0 && text::is_word_char(s[i - 1]))) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& [value, category] : table.by_length()) {
      const std::size_t len = value.size();
      if (i + len > n) continue;
      if (!text::iequals(s.substr(i, len), value)) continue;
      if (i + len < n && text::is_word_char(s[i + len])) continue;
      spans.push_back({category, value, i, i + len});
      i += len;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return spans;
}

void validate_case(const SourceTestCase& c, const SensitiveAttributeTable& table) {
  const std::string where = "case '" + c.id + "': ";
  if (c.id.empty()) throw ValidationError("case with empty id");
  if (text::trim(c.text).empty()) throw ValidationError(where + "text is empty");
  std::size_t prev_end = 0;
  for (const auto& span : c.attributes) {
    if (span.start >= span.end || span.end > c.text.size()) {
      throw ValidationError(where + "span [" + std::to_string(span.start) + "," +
                            std::to_string(span.end) + ") is out of range");
    }
    if (span.start < prev_end) {
      throw ValidationError(where + "spans overlap or are not sorted by start");
    }
    const auto category = table.category_of(span.value);
    if (!category || *category != span.category) {
      throw ValidationError(where + "'" + span.value + "' is not a " + span.category +
                            " value");
    }
    if (!text::iequals(std::string_view(c.text).substr(span.start, span.end - span.start),
                       span.value)) {
      throw ValidationError(where + "span text does not match value '" + span.value + "'");
    }
    prev_end = span.end;
  }
}

std::vector<SourceTestCase> parse_corpus(std::string_view jsonl,
                                         const SensitiveAttributeTable& table) {
  std::vector<SourceTestCase> cases;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const std::size_t nl = jsonl.find('\n', pos);
    const std::string_view line =
        jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? jsonl.size() + 1 : nl + 1;
    if (text::trim(line).empty()) continue;

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("text") || !rec["text"].is_string()) {
      throw ParseError("record needs string fields 'id' and 'text'", line_no);
    }
    SourceTestCase c;
    c.id = rec["id"].get<std::string>();
    c.text = rec["text"].get<std::string>();
    if (text::trim(c.text).empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": case '" + c.id +
                            "' has empty text");
    }
    if (!ids.insert(c.id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate id '" + c.id + "'");
    }
    if (rec.contains("attributes")) {
      const auto& attrs = rec["attributes"];
      if (!attrs.is_array()) throw ParseError("'attributes' must be an array", line_no);
      try {
        for (const auto& a : attrs) {
          c.attributes.push_back({a.at("category").get<std::string>(),
                                  a.at("value").get<std::string>(),
                                  a.at("start").get<std::size_t>(),
                                  a.at("end").get<std::size_t>()});
        }
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad attribute: ") + e.what(), line_no);
      }
    } else {
      c.attributes = annotate_attributes(c.text, table);
    }
    validate_case(c, table);
    cases.push_back(std::move(c));
  }
  if (cases.empty()) throw ValidationError("corpus is empty");
  return cases;
}

std::vector<SourceTestCase> load_corpus(const std::filesystem::path& path,
                                        const SensitiveAttributeTable& table) {
  return parse_corpus(read_file(path), table);
}

std::string format_corpus(const std::vector<SourceTestCase>& cases) {
  std::string out;
  for (const auto& c : cases) {
    ordered_json rec;
    rec["id"] = c.id;
    rec["text"] = c.text;
    rec["attributes"] = ordered_json::array();
    for (const auto& a : c.attributes) {
      rec["attributes"].push_back(
          {{"category", a.category}, {"value", a.value}, {"start", a.start}, {"end", a.end}});
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const std::filesystem::path& path, const std::vector<SourceTestCase>& cases) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << format_corpus(cases);
}

std::string_view indefinite_article(std::string_view next_word) {
  return starts_with_vowel_sound(next_word) ? "an" : "a";
}

std::optional<TextEdit> article_fix(std::string_view s, std::size_t pos) {
  if (pos > s.size()) return std::nullopt;
  std::size_t e = pos;
  while (e > 0 && s[e - 1] == ' ') --e;
  if (e == pos) return std::nullopt;  // article must be separated by whitespace
  std::size_t b = e;
  while (b > 0 && text::is_word_char(s[b - 1])) --b;
  if (b > 0 && s[b - 1] == '-') return std::nullopt;
  const std::string_view article = s.substr(b, e - b);
  if (!text::iequals(article, "a") && !text::iequals(article, "an")) return std::nullopt;

  std::size_t we = pos;
  while (we < s.size() && (text::is_word_char(s[we]) || s[we] == '-')) ++we;
  const std::string_view next = s.substr(pos, we - pos);
  if (next.empty()) return std::nullopt;

  std::string wanted(indefinite_article(next));
  if (article[0] == 'A') wanted[0] = 'A';
  if (article == wanted) return std::nullopt;
  return TextEdit{b, e - b, wanted};
}

std::ptrdiff_t fix_article_before(std::string& s, std::size_t pos) {
  const auto edit = article_fix(s, pos);
  if (!edit) return 0;
  s.replace(edit->pos, edit->length, edit->replacement);
  return static_cast<std::ptrdiff_t>(edit->replacement.size()) -
         static_cast<std::ptrdiff_t>(edit->length);
}

std::vector<SourceTestCase> expand_templates(std::string_view tmpl,
                                             const SensitiveAttributeTable& table,
                                             const std::vector<std::string>& slots,
                                             std::uint64_t seed, std::string_view id_prefix,
                                             std::size_t max_cases) {
  if (slots.empty()) throw ValidationError("template expansion needs at least one slot");
  std::set<std::string> slot_set;
  for (const auto& s : slots) {
    if (!table.has_category(s)) throw ValidationError("unknown template slot {" + s + "}");
    if (!slot_set.insert(s).second) throw ValidationError("duplicate template slot {" + s + "}");
  }

  // Split the template into literal text and placeholder references.
  struct Piece {
    std::string literal;
    int slot = -1;
  };
  std::vector<Piece> pieces;
  std::set<std::string> seen;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      pieces.push_back({std::string(tmpl.substr(pos)), -1});
      break;
    }
    const std::size_t close = tmpl.find('}', open);
    if (close == std::string_view::npos) throw ValidationError("unterminated placeholder in template");
    if (open > pos) pieces.push_back({std::string(tmpl.substr(pos, open - pos)), -1});
    const std::string name(tmpl.substr(open + 1, close - open - 1));
    const auto it = std::find(slots.begin(), slots.end(), name);
    if (it == slots.end()) {
      throw ValidationError("placeholder {" + name + "} has no matching slot category");
    }
    pieces.push_back({"", static_cast<int>(it - slots.begin())});
    seen.insert(name);
    pos = close + 1;
  }
  for (const auto& s : slots) {
    if (seen.count(s) == 0) throw ValidationError("slot {" + s + "} does not appear in the template");
  }

  std::size_t total = 1;
  for (const auto& s : slots) total *= table.values(s).size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  text::SeededRng rng(seed);
  for (std::size_t i = total; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  if (max_cases != 0 && max_cases < total) order.resize(max_cases);

  std::vector<SourceTestCase> out;
  out.reserve(order.size());
  for (std::size_t combo : order) {
    std::vector<std::string> chosen(slots.size());
    for (std::size_t k = slots.size(); k-- > 0;) {
      const auto& vals = table.values(slots[k]);
      chosen[k] = vals[combo % vals.size()];
      combo /= vals.size();
    }
    std::string s;
    for (const auto& p : pieces) {
      if (p.slot < 0) {
        s += p.literal;
        continue;
      }
      const std::size_t at = s.size();
      s += (at == 0) ? text::capitalize_first(chosen[p.slot]) : chosen[p.slot];
      fix_article_before(s, at);
    }
    std::string id(id_prefix);
    for (const auto& v : chosen) id += "-" + slug(v);
    SourceTestCase c{id, s, annotate_attributes(s, table)};
    validate_case(c, table);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace fairprio::corpus
