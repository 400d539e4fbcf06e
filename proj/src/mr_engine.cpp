// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/mr_engine.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "fairprio/embedded.hpp"
#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio {

MrId MrId::parse(std::string_view s) {
  if (s.size() < 3 || !text::iequals(s.substr(0, 2), "mr")) {
    throw ValidationError("invalid MR id '" + std::string(s) + "'");
  }
  int n = 0;
  for (char c : s.substr(2)) {
    if (c < '0' || c > '9' || n > 100000) {
      throw ValidationError("invalid MR id '" + std::string(s) + "'");
    }
    n = n * 10 + (c - '0');
  }
  return MrId(n);
}

}  // namespace fairprio

namespace fairprio::mr {

using corpus::AttributeSpan;
using corpus::SensitiveAttributeTable;
using corpus::SourceTestCase;

namespace {

// Text with a log of the replacements applied to it, so offsets taken
// before an edit can be carried over to the edited text.
class Editor {
 public:
  explicit Editor(std::string s) : s_(std::move(s)) {}

  const std::string& str() const noexcept { return s_; }

  void replace(std::size_t pos, std::size_t len, std::string_view with) {
    s_.replace(pos, len, with);
    log_.push_back({pos, len, with.size()});
  }

  void apply(const corpus::TextEdit& e) { replace(e.pos, e.length, e.replacement); }

  /// Maps an offset taken before edit number `since` to the current text.
  std::size_t map(std::size_t offset, std::size_t since) const {
    for (std::size_t i = since; i < log_.size(); ++i) {
      const auto& e = log_[i];
      if (offset >= e.pos + e.old_len) {
        offset = offset - e.old_len + e.new_len;
      } else if (offset > e.pos) {
        offset = e.pos + std::min(offset - e.pos, e.new_len);
      }
    }
    return offset;
  }

  std::size_t checkpoint() const noexcept { return log_.size(); }

  /// Repairs an article in front of the first word at or after `pos`.
  void fix_article_near(std::size_t pos) {
    while (pos < s_.size() && s_[pos] == ' ') ++pos;
    if (pos >= s_.size() || !text::is_word_char(s_[pos])) return;
    if (const auto e = corpus::article_fix(s_, pos)) apply(*e);
  }

 private:
  struct Logged {
    std::size_t pos;
    std::size_t old_len;
    std::size_t new_len;
  };
  std::string s_;
  std::vector<Logged> log_;
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool at_sentence_start(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i > 0 && s[i - 1] == ' ') --i;
  return i == 0 || s[i - 1] == '.' || s[i - 1] == '!' || s[i - 1] == '?';
}

struct Word {
  std::size_t start;
  std::size_t end;
  std::string folded;
};

// Words are maximal runs of letters, digits and inner hyphens.
std::vector<Word> words_of(std::string_view s) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!text::is_word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() &&
           (text::is_word_char(s[j]) ||
            (s[j] == '-' && j + 1 < s.size() && text::is_word_char(s[j + 1])))) {
      ++j;
    }
    out.push_back({i, j, text::casefold(s.substr(i, j - i))});
    i = j;
  }
  return out;
}

struct PersonNoun {
  bool matched = false;
  bool plural = false;
};

PersonNoun person_noun(const std::string& folded, const MrTemplates& t) {
  if (t.person_nouns.count(folded) != 0) return {true, false};
  if (folded == "people" || folded == "children" || folded == "families") return {true, true};
  if (folded.size() > 1 && folded.back() == 's' &&
      t.person_nouns.count(folded.substr(0, folded.size() - 1)) != 0) {
    return {true, true};
  }
  return {false, false};
}

const std::set<std::string>& np_stop_words() {
  static const std::set<std::string> stop = {
      "of",   "for",  "from", "to",   "in",    "at",  "with", "and", "or",  "who",
      "that", "when", "while", "on",  "by",    "as",  "is",   "are", "was", "were",
      "be",   "has",  "have", "had",  "their", "his", "her",  "its", "the", "a",
      "an",   "this", "these", "those", "into", "about", "after", "before", "during",
      "can",  "could", "may", "might", "must", "shall", "should", "will", "would"};
  return stop;
}

std::string fill_template(std::string_view tmpl, std::string_view value, bool plural) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i++]);
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    if (close == std::string_view::npos) throw ValidationError("unterminated placeholder in MR template");
    const std::string_view key = tmpl.substr(i + 1, close - i - 1);
    if (key == "value") {
      out += value;
    } else if (key == "a") {
      out += corpus::indefinite_article(value);
    } else if (key == "be") {
      out += plural ? "are" : "is";
    } else if (key == "s") {
      if (!plural) out += "s";
    } else {
      throw ValidationError("unknown MR template placeholder {" + std::string(key) + "}");
    }
    i = close + 1;
  }
  return out;
}

// Removes one span from the editor's current text. `span` offsets refer to
// the current text.
void remove_one(Editor& ed, std::size_t a, std::size_t b) {
  const std::string& s = ed.str();
  const std::size_t n = s.size();

  // "of <value> descent" goes as a whole.
  constexpr std::string_view descent = " descent";
  if (a >= 3 && text::iequals(std::string_view(s).substr(a - 3, 3), "of ") &&
      (a == 3 || !text::is_word_char(s[a - 4])) && b + descent.size() <= n &&
      text::iequals(std::string_view(s).substr(b, descent.size()), descent) &&
      (b + descent.size() == n || !text::is_word_char(s[b + descent.size()]))) {
    a -= 3;
    b += descent.size();
    if (a > 0 && s[a - 1] == ' ') --a;
    ed.replace(a, b - a, "");
    return;
  }

  // A compound such as "Spanish-speaking" goes as a whole.
  while (b + 1 < n && s[b] == '-' && text::is_word_char(s[b + 1])) {
    ++b;
    while (b < n && text::is_word_char(s[b])) ++b;
  }
  while (a >= 2 && s[a - 1] == '-' && text::is_word_char(s[a - 2])) {
    --a;
    while (a > 0 && text::is_word_char(s[a - 1])) --a;
  }

  if (b < n && s[b] == ',') {
    ++b;
    while (b < n && s[b] == ' ') ++b;
  } else if (b < n && s[b] == ' ') {
    if (a >= 2 && s[a - 2] == ',' && s[a - 1] == ' ') {
      a -= 2;
    } else {
      while (b < n && s[b] == ' ') ++b;
    }
  } else {
    while (a > 0 && s[a - 1] == ' ') --a;
  }
  ed.replace(a, b - a, "");
  ed.fix_article_near(a);
}

// True when the word ending at `end` does not modify a following word:
// nothing follows, punctuation follows, or a function word does.
bool is_object_position(std::string_view s, std::size_t end) {
  if (end < s.size() && text::is_word_char(s[end])) return false;
  if (end < s.size() && s[end] == '-') return false;
  const auto words = words_of(s.substr(end));
  if (words.empty()) return true;
  if (s.substr(end, words.front().start).find_first_not_of(' ') != std::string_view::npos) return true;
  return np_stop_words().count(words.front().folded) != 0;
}

std::string tidy(std::string s, bool capitalize) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    if ((c == ',' || c == '.' || c == '?' || c == '!' || c == ';' || c == ':') &&
        !out.empty() && out.back() == ' ') {
      out.pop_back();
    }
    if ((c == '.' || c == '?' || c == '!') && !out.empty() && out.back() == ',') out.pop_back();
    out.push_back(c);
  }
  while (!out.empty() && (out.front() == ',' || out.front() == ' ')) out.erase(out.begin());
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (capitalize) out = text::capitalize_first(out);
  return out;
}

std::string swap_pronouns(std::string_view s, bool to_female) {
  static const std::map<std::string, std::string> m2f = {
      {"he", "she"}, {"him", "her"}, {"his", "her"}, {"himself", "herself"}};
  static const std::map<std::string, std::string> f2m = {
      {"she", "he"}, {"her", "his"}, {"hers", "his"}, {"herself", "himself"}};
  const auto& table = to_female ? m2f : f2m;
  Editor ed{std::string(s)};
  auto words = words_of(s);
  for (auto it = words.rbegin(); it != words.rend(); ++it) {
    const auto found = table.find(it->folded);
    if (found == table.end()) continue;
    std::string repl = found->second;
    if (is_upper(s[it->start])) repl = text::capitalize_first(repl);
    ed.replace(it->start, it->end - it->start, repl);
  }
  return ed.str();
}

std::uint64_t case_seed(std::uint64_t seed, MrId mr, const std::string& case_id) {
  return text::hash64(case_id, seed ^ (static_cast<std::uint64_t>(mr.number()) << 48));
}

std::multiset<std::string> folded_values(const std::vector<AttributeSpan>& spans) {
  std::multiset<std::string> out;
  for (const auto& s : spans) out.insert(text::casefold(s.value));
  return out;
}

std::string decapitalize_unless_proper(std::string_view s, const std::vector<AttributeSpan>& spans) {
  std::string out(s);
  if (out.empty() || !is_upper(out[0])) return out;
  for (const auto& sp : spans) {
    if (sp.start == 0 && is_upper(sp.value[0])) return out;
  }
  if (out[0] == 'I' && (out.size() == 1 || out[1] == ' ')) return out;  // "I"
  if (out.size() > 1 && is_upper(out[1])) return out;                    // acronyms
  out[0] = text::lower(out[0]);
  return out;
}

std::vector<std::string> absent_categories(const SourceTestCase& c,
                                           const SensitiveAttributeTable& table,
                                           const std::map<std::string, std::string>& templates) {
  std::vector<std::string> out;
  for (const auto& [name, values] : table.categories()) {
    const bool present = std::any_of(c.attributes.begin(), c.attributes.end(),
                                     [&](const AttributeSpan& s) { return s.category == name; });
    if (!present && templates.count(name) != 0) out.push_back(name);
  }
  return out;
}

// ---- individual relations --------------------------------------------------

MrOutcome paraphrase_synonyms(const SourceTestCase& c, const MrTemplates& t) {
  std::vector<std::pair<std::string, std::string>> entries(t.synonyms.begin(), t.synonyms.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  const std::string& s = c.text;
  const auto inside_span = [&](std::size_t a, std::size_t b) {
    return std::any_of(c.attributes.begin(), c.attributes.end(),
                       [&](const AttributeSpan& sp) { return a < sp.end && sp.start < b; });
  };

  std::vector<corpus::TextEdit> edits;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!text::is_word_char(s[i]) || (i > 0 && text::is_word_char(s[i - 1]))) {
      ++i;
      continue;
    }
    bool hit = false;
    for (const auto& [from, to] : entries) {
      const std::size_t len = from.size();
      if (i + len > s.size() || !text::iequals(std::string_view(s).substr(i, len), from)) continue;
      if (i + len < s.size() && text::is_word_char(s[i + len])) continue;
      if (inside_span(i, i + len)) continue;
      std::string repl = to;
      if (is_upper(s[i])) repl = text::capitalize_first(repl);
      edits.push_back({i, len, repl});
      i += len;
      hit = true;
      break;
    }
    if (!hit) ++i;
  }
  if (edits.empty()) return Inapplicable{"no synonym site outside the attribute spans"};

  Editor ed(s);
  std::vector<std::string> notes;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    notes.push_back("'" + s.substr(it->pos, it->length) + "' -> '" + it->replacement + "'");
    ed.apply(*it);
    ed.fix_article_near(it->pos);
  }
  std::reverse(notes.begin(), notes.end());
  std::string note = "synonyms:";
  for (const auto& n : notes) note += " " + n;
  return TestPair{MrId(3), c, tidy(ed.str(), false), note};
}

std::optional<std::string> front_prepositional_phrase(const SourceTestCase& c,
                                                      const MrTemplates& t) {
  const std::string body = text::trim(c.text);
  if (body.empty() || body.back() != '.') return std::nullopt;
  const std::string_view core = std::string_view(body).substr(0, body.size() - 1);
  const auto words = words_of(core);
  for (std::size_t w = 3; w + 2 <= words.size(); ++w) {
    if (t.fronting_prepositions.count(words[w].folded) == 0) continue;
    // A participle without an auxiliary ("officer honored for bravery")
    // takes the phrase as its own complement; leave it in place.
    static const std::set<std::string> aux = {"is", "are", "was", "were", "be", "been", "being"};
    if (words[w - 1].folded.ends_with("ed") && aux.count(words[w - 2].folded) == 0) continue;
    const std::size_t pp_start = words[w].start;
    if (core.find(',', pp_start) != std::string_view::npos) continue;
    const bool has_span = std::any_of(c.attributes.begin(), c.attributes.end(),
                                      [&](const AttributeSpan& sp) { return sp.end > pp_start; });
    if (has_span) continue;
    std::string main(core.substr(0, pp_start));
    while (!main.empty() && (main.back() == ' ' || main.back() == ',')) main.pop_back();
    const std::string pp(core.substr(pp_start));
    return text::capitalize_first(pp) + ", " + decapitalize_unless_proper(main, c.attributes) + ".";
  }
  return std::nullopt;
}

MrOutcome paraphrase_context(const SourceTestCase& c, const MrTemplates& t) {
  if (auto fronted = front_prepositional_phrase(c, t)) {
    return TestPair{MrId(9), c, *fronted, "fronted the trailing prepositional phrase"};
  }
  const std::string body = text::trim(c.text);
  const auto words = words_of(body);
  std::string kind = "statement";
  if (!body.empty() && body.back() == '?') {
    kind = "question";
  } else if (!words.empty() && words.front().start == 0 &&
             t.imperative_verbs.count(words.front().folded) != 0) {
    kind = "imperative";
  }
  const auto tmpl = t.reframe.find(kind);
  if (tmpl == t.reframe.end()) return Inapplicable{"no reframe template for " + kind};
  const std::string inner = kind == "statement" ? body : decapitalize_unless_proper(body, c.attributes);
  std::string out = tmpl->second;
  const auto at = out.find("{text}");
  if (at == std::string::npos) throw ValidationError("reframe template lacks {text}");
  out.replace(at, 6, inner);
  return TestPair{MrId(9), c, out, "reframed " + kind + " context"};
}

struct ReorderSite {
  std::size_t span_index;
  std::size_t head_end;
  bool plural;
};

std::optional<ReorderSite> reorder_site(const SourceTestCase& c, std::size_t k, const MrTemplates& t) {
  const auto& sp = c.attributes[k];
  if (person_noun(text::casefold(sp.value), t).matched) return std::nullopt;
  const std::string& s = c.text;
  std::size_t pos = sp.end;
  for (int steps = 0; steps < 4; ++steps) {
    if (pos < s.size() && s[pos] == ',') ++pos;
    if (pos >= s.size() || s[pos] != ' ') return std::nullopt;
    while (pos < s.size() && s[pos] == ' ') ++pos;
    const auto words = words_of(std::string_view(s).substr(pos));
    if (words.empty() || words.front().start != 0) return std::nullopt;
    const Word& w = words.front();
    if (np_stop_words().count(w.folded) != 0) return std::nullopt;
    const PersonNoun pn = person_noun(w.folded, t);
    if (pn.matched) return ReorderSite{k, pos + w.end, pn.plural};
    pos += w.end;
  }
  return std::nullopt;
}

MrOutcome shuffle_position(const SourceTestCase& c, const MrTemplates& t, text::SeededRng& rng) {
  if (c.attributes.empty()) return Inapplicable{"no sensitive attribute to move"};
  std::vector<ReorderSite> sites;
  for (std::size_t k = 0; k < c.attributes.size(); ++k) {
    if (auto site = reorder_site(c, k, t)) sites.push_back(*site);
  }
  if (sites.empty()) return Inapplicable{"no pre-nominal attribute with a person-noun head"};
  const ReorderSite site = sites[rng.index(sites.size())];
  const AttributeSpan& sp = c.attributes[site.span_index];

  Editor ed(c.text);
  const std::size_t mark = ed.checkpoint();
  remove_one(ed, sp.start, sp.end);
  const std::size_t head_end = ed.map(site.head_end, mark);
  ed.replace(head_end, 0, " " + fill_template(t.reorder, sp.value, site.plural));
  const bool cap = is_upper(c.text[0]);
  return TestPair{MrId(7), c, tidy(ed.str(), cap),
                  "moved " + sp.category + " '" + sp.value + "' after its head noun"};
}

MrOutcome substitute(const MrDefinition& mr, const SourceTestCase& c,
                     const SensitiveAttributeTable& table, const std::vector<std::string>& axis,
                     text::SeededRng& rng) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> eligible;
  for (std::size_t k = 0; k < c.attributes.size(); ++k) {
    const auto& sp = c.attributes[k];
    if (std::find(axis.begin(), axis.end(), sp.category) == axis.end()) continue;
    std::vector<std::string> candidates;
    const std::string& opposite = table.contrast(sp.value);
    for (const auto& v : table.values(sp.category)) {
      if (!text::iequals(v, sp.value) && !text::iequals(v, opposite)) candidates.push_back(v);
    }
    if (!candidates.empty()) eligible.emplace_back(k, std::move(candidates));
  }
  if (eligible.empty()) {
    return Inapplicable{"no span in a substitution category with a non-contrast alternative"};
  }
  const auto& [k, candidates] = eligible[rng.index(eligible.size())];
  const std::string& repl = candidates[rng.index(candidates.size())];
  const auto& sp = c.attributes[k];
  return TestPair{mr.id, c, replace_spans(c.text, {sp}, {repl}),
                  "substituted " + sp.category + " '" + sp.value + "' -> '" + repl + "'"};
}

std::size_t expected_span_count(MrId id, std::size_t k) {
  switch (id.number()) {
    case 1: return k - 1;
    case 2: return 0;
    case 6:
    case 11: return k + 1;
    default: return k;
  }
}

}  // namespace

std::string_view to_string(MrCategory c) noexcept {
  switch (c) {
    case MrCategory::removal: return "removal";
    case MrCategory::negation: return "negation";
    case MrCategory::addition: return "addition";
    case MrCategory::shuffling: return "shuffling";
    case MrCategory::substitution: return "substitution";
    case MrCategory::paraphrasing: return "paraphrasing";
    case MrCategory::concatenation: return "concatenation";
  }
  return "?";
}

const std::vector<MrDefinition>& registry() {
  static const std::vector<MrDefinition> mrs = {
      {MrId(1), MrCategory::removal, "Removal of a single sensitive attribute",
       "Remove one sensitive attribute from the source prompt."},
      {MrId(2), MrCategory::removal, "Complete removal of all sensitive attributes",
       "Remove every sensitive attribute from the source prompt."},
      {MrId(3), MrCategory::paraphrasing, "Semantic paraphrasing",
       "Rephrase the prompt with synonyms, keeping every sensitive attribute."},
      {MrId(4), MrCategory::negation, "Selective negation",
       "Replace one sensitive attribute with its contrasting value."},
      {MrId(5), MrCategory::negation, "Total negation",
       "Replace every sensitive attribute with its contrasting value."},
      {MrId(6), MrCategory::addition, "Add a single sensitive attribute",
       "Attach one new sensitive attribute to the person in the prompt."},
      {MrId(7), MrCategory::shuffling, "Attribute position shuffling",
       "Move a sensitive attribute to a different position in the sentence."},
      {MrId(8), MrCategory::substitution, "Sensitive attribute substitution",
       "Substitute one attribute with a comparable value of the same category "
       "(demographic axis)."},
      {MrId(9), MrCategory::paraphrasing, "Contextual paraphrasing",
       "Rephrase the context around the sensitive attributes, keeping them verbatim."},
      {MrId(10), MrCategory::substitution, "Sensitive attribute substitution (second axis)",
       "Substitute one attribute with a comparable value of the same category "
       "(social and occupational axis)."},
      {MrId(11), MrCategory::concatenation, "Sensitive attribute concatenation",
       "Append a clause stating a sensitive attribute absent from the prompt."},
  };
  return mrs;
}

const MrDefinition& definition(MrId id) {
  for (const auto& d : registry()) {
    if (d.id == id) return d;
  }
  throw ValidationError("unknown metamorphic relation " + id.str());
}

const MrTemplates& MrTemplates::builtin() {
  static const MrTemplates t = from_json(detail::embedded_file("mr_templates.json"), MrTemplates{});
  return t;
}

MrTemplates MrTemplates::from_json(std::string_view json_text, const MrTemplates& base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("MR templates: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ValidationError("MR templates must be a JSON object");
  MrTemplates t = base;
  try {
    if (doc.contains("mr8_axis")) t.mr8_axis = doc["mr8_axis"].get<std::vector<std::string>>();
    if (doc.contains("mr10_axis")) t.mr10_axis = doc["mr10_axis"].get<std::vector<std::string>>();
    if (doc.contains("insertion")) t.insertion = doc["insertion"].get<std::map<std::string, std::string>>();
    if (doc.contains("reorder")) t.reorder = doc["reorder"].get<std::string>();
    if (doc.contains("concatenation")) {
      t.concatenation = doc["concatenation"].get<std::map<std::string, std::string>>();
    }
    if (doc.contains("synonyms")) {
      t.synonyms.clear();
      for (const auto& [k, v] : doc["synonyms"].items()) t.synonyms[text::casefold(k)] = v.get<std::string>();
    }
    const auto folded_set = [](const nlohmann::json& arr) {
      std::set<std::string> out;
      for (const auto& w : arr) out.insert(text::casefold(w.get<std::string>()));
      return out;
    };
    if (doc.contains("fronting_prepositions")) t.fronting_prepositions = folded_set(doc["fronting_prepositions"]);
    if (doc.contains("imperative_verbs")) t.imperative_verbs = folded_set(doc["imperative_verbs"]);
    if (doc.contains("person_nouns")) t.person_nouns = folded_set(doc["person_nouns"]);
    if (doc.contains("reframe")) t.reframe = doc["reframe"].get<std::map<std::string, std::string>>();
    if (doc.contains("neutral")) t.neutral = doc["neutral"].get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("MR templates: ") + e.what());
  }
  return t;
}

MrTemplates MrTemplates::load(const std::string& path, const MrTemplates& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read MR template file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), base);
}

std::string remove_spans(std::string_view text, std::vector<AttributeSpan> spans,
                         const MrTemplates& templates) {
  std::sort(spans.begin(), spans.end(),
            [](const AttributeSpan& a, const AttributeSpan& b) { return a.start > b.start; });
  Editor ed{std::string(text)};
  for (const auto& sp : spans) {
    const PersonNoun pn = person_noun(text::casefold(sp.value), templates);
    if (!pn.matched) {
      const auto neutral = templates.neutral.find(sp.category);
      if (neutral != templates.neutral.end() && is_object_position(ed.str(), sp.end)) {
        ed.replace(sp.start, sp.end - sp.start, neutral->second);
      } else {
        remove_one(ed, sp.start, sp.end);
      }
      continue;
    }
    // A head noun cannot go without breaking the phrase; neutralize it.
    std::string repl = pn.plural ? "people" : "person";
    if (is_upper(ed.str()[sp.start])) repl = text::capitalize_first(repl);
    ed.replace(sp.start, sp.end - sp.start, repl);
    ed.fix_article_near(sp.start);
  }
  return tidy(ed.str(), !text.empty() && is_upper(text[0]));
}

std::string replace_spans(std::string_view text, const std::vector<AttributeSpan>& spans,
                          const std::vector<std::string>& replacements) {
  if (spans.size() != replacements.size()) {
    throw ValidationError("replace_spans: spans and replacements differ in length");
  }
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return spans[a].start > spans[b].start; });

  Editor ed{std::string(text)};
  int to_female = 0;  // +1 male->female, -1 female->male
  bool gender_conflict = false;
  for (std::size_t i : order) {
    const auto& sp = spans[i];
    std::string repl = replacements[i];
    if (is_upper(ed.str()[sp.start]) && at_sentence_start(ed.str(), sp.start)) {
      repl = text::capitalize_first(repl);
    }
    ed.replace(sp.start, sp.end - sp.start, repl);
    ed.fix_article_near(sp.start);
    if (sp.category == "GENDER" && !text::iequals(sp.value, repl)) {
      const int dir = text::iequals(repl, "female") ? 1 : text::iequals(repl, "male") ? -1 : 0;
      if (to_female != 0 && dir != to_female) gender_conflict = true;
      to_female = dir;
    }
  }
  if (to_female != 0 && !gender_conflict) return swap_pronouns(ed.str(), to_female > 0);
  return ed.str();
}

std::optional<std::string> insert_attribute(const SourceTestCase& c, const std::string& category,
                                            const std::string& value,
                                            const MrTemplates& templates) {
  const auto tmpl = templates.insertion.find(category);
  if (tmpl == templates.insertion.end()) {
    throw ValidationError("no insertion template for category " + category);
  }
  std::optional<std::size_t> site;
  bool plural = false;
  // The head noun of an existing attribute comes first.
  for (std::size_t k = 0; k < c.attributes.size() && !site; ++k) {
    const auto& sp = c.attributes[k];
    const PersonNoun pn = person_noun(text::casefold(sp.value), templates);
    if (pn.matched) {
      site = sp.end;
      plural = pn.plural;
    } else if (const auto r = reorder_site(c, k, templates)) {
      site = r->head_end;
      plural = r->plural;
    }
  }
  // Otherwise a person noun opening a determiner phrase.
  if (!site) {
    static const std::set<std::string> determiners = {
        "a", "an", "the", "this", "that", "my", "your", "our", "their", "his", "her", "each", "every"};
    const auto words = words_of(c.text);
    for (std::size_t i = 0; i < words.size() && !site; ++i) {
      const PersonNoun pn = person_noun(words[i].folded, templates);
      if (!pn.matched) continue;
      if (i + 1 < words.size() && person_noun(words[i + 1].folded, templates).matched &&
          c.text.find_first_not_of(' ', words[i].end) == words[i + 1].start) {
        continue;  // modifier of a following noun
      }
      for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
        const std::size_t j = i - back;
        if (c.text.find_first_of(",.;:?!", words[j].end) < words[j + 1].start) break;
        if (determiners.count(words[j].folded) != 0) {
          site = words[i].end;
          plural = pn.plural;
          break;
        }
      }
    }
  }
  if (!site) return std::nullopt;
  std::string out = c.text;
  out.insert(*site, " " + fill_template(tmpl->second, value, plural));
  return out;
}

std::string append_attribute_clause(std::string_view text, const std::string& category,
                                    const std::string& value, const MrTemplates& templates) {
  const auto tmpl = templates.concatenation.find(category);
  if (tmpl == templates.concatenation.end()) {
    throw ValidationError("no concatenation template for category " + category);
  }
  std::string out = text::trim(text);
  if (!out.empty() && out.back() != '.' && out.back() != '?' && out.back() != '!') out += '.';
  return out + " " + fill_template(tmpl->second, value, false);
}

MrOutcome apply_mr(const MrDefinition& mr, const SourceTestCase& c,
                   const SensitiveAttributeTable& table, std::uint64_t seed,
                   const MrTemplates& templates) {
  text::SeededRng rng(case_seed(seed, mr.id, c.id));
  const auto& spans = c.attributes;
  const std::size_t k = spans.size();

  MrOutcome out = Inapplicable{"unhandled relation " + mr.id.str()};
  switch (mr.id.number()) {
    case 1: {
      if (k == 0) return Inapplicable{"no sensitive attribute to remove"};
      // Prefer attributes that are not the head noun of their phrase.
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < k; ++i) {
        if (!person_noun(text::casefold(spans[i].value), templates).matched) pool.push_back(i);
      }
      if (pool.empty()) {
        pool.resize(k);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
      }
      const auto& sp = spans[pool[rng.index(pool.size())]];
      out = TestPair{mr.id, c, remove_spans(c.text, {sp}, templates),
                     "removed " + sp.category + " '" + sp.value + "'"};
      break;
    }
    case 2: {
      if (k == 0) return Inapplicable{"no sensitive attribute to remove"};
      out = TestPair{mr.id, c, remove_spans(c.text, spans, templates),
                     "removed all " + std::to_string(k) + " sensitive attributes"};
      break;
    }
    case 3: {
      if (k == 0) return Inapplicable{"no sensitive attribute in the prompt"};
      out = paraphrase_synonyms(c, templates);
      break;
    }
    case 4: {
      if (k == 0) return Inapplicable{"no sensitive attribute to negate"};
      const auto& sp = spans[rng.index(k)];
      const std::string& opposite = table.contrast(sp.value);
      out = TestPair{mr.id, c, replace_spans(c.text, {sp}, {opposite}),
                     "negated " + sp.category + " '" + sp.value + "' -> '" + opposite + "'"};
      break;
    }
    case 5: {
      if (k == 0) return Inapplicable{"no sensitive attribute to negate"};
      std::vector<std::string> repl;
      std::string note = "negated all:";
      for (const auto& sp : spans) {
        repl.push_back(table.contrast(sp.value));
        note += " '" + sp.value + "' -> '" + repl.back() + "'";
      }
      out = TestPair{mr.id, c, replace_spans(c.text, spans, repl), note};
      break;
    }
    case 6:
    case 11: {
      const auto& tmpls = mr.id.number() == 6 ? templates.insertion : templates.concatenation;
      const auto free = absent_categories(c, table, tmpls);
      if (free.empty()) return Inapplicable{"every category already present"};
      const std::string& category = free[rng.index(free.size())];
      const auto& values = table.values(category);
      const std::string& value = values[rng.index(values.size())];
      if (mr.id.number() == 6) {
        const auto inserted = insert_attribute(c, category, value, templates);
        if (!inserted) return Inapplicable{"no person noun to attach the attribute to"};
        out = TestPair{mr.id, c, *inserted, "added " + category + " '" + value + "'"};
      } else {
        out = TestPair{mr.id, c, append_attribute_clause(c.text, category, value, templates),
                       "appended " + category + " '" + value + "' clause"};
      }
      break;
    }
    case 7:
      out = shuffle_position(c, templates, rng);
      break;
    case 8:
      out = substitute(mr, c, table, templates.mr8_axis, rng);
      break;
    case 9: {
      if (k == 0) return Inapplicable{"no sensitive attribute in the prompt"};
      out = paraphrase_context(c, templates);
      break;
    }
    case 10:
      out = substitute(mr, c, table, templates.mr10_axis, rng);
      break;
    default:
      throw ValidationError("unknown metamorphic relation " + mr.id.str());
  }

  auto* pair = std::get_if<TestPair>(&out);
  if (pair == nullptr) return out;
  pair->mr_id = mr.id;
  if (text::trim(pair->follow_up_text).empty() || pair->follow_up_text == c.text) {
    return Inapplicable{"transformation left the prompt unchanged"};
  }
  const auto after = corpus::annotate_attributes(pair->follow_up_text, table);
  const std::size_t want = expected_span_count(mr.id, k);
  if (after.size() != want) {
    return Inapplicable{"rewrite broke span conservation (expected " + std::to_string(want) +
                        " attributes, found " + std::to_string(after.size()) + ")"};
  }
  if ((mr.id.number() == 3 || mr.id.number() == 7 || mr.id.number() == 9) &&
      folded_values(after) != folded_values(spans)) {
    return Inapplicable{"rewrite changed the attribute values"};
  }
  return out;
}

DerivedPairs derive_pairs(const MrDefinition& mr, const std::vector<SourceTestCase>& cases,
                          const SensitiveAttributeTable& table, std::uint64_t seed,
                          const MrTemplates& templates) {
  if (cases.empty()) throw ValidationError("cannot derive pairs from an empty corpus");
  DerivedPairs out{mr.id, {}, {}};
  for (const auto& c : cases) {
    auto outcome = apply_mr(mr, c, table, seed, templates);
    if (auto* p = std::get_if<TestPair>(&outcome)) {
      out.pairs.push_back(std::move(*p));
    } else {
      out.skipped.push_back({c.id, std::get<Inapplicable>(outcome).reason});
    }
  }
  return out;
}

}  // namespace fairprio::mr
