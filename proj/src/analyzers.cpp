// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/analyzers.hpp"

#include <algorithm>
#include <numeric>

#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio::analyzers {

TokenList tokenize(std::string_view s) {
  TokenList tokens;
  std::string cur;
  for (char c : s) {
    if (text::is_word_char(c)) {
      cur.push_back(text::lower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

TfIdfModel TfIdfModel::fit(const std::vector<TokenList>& docs) {
  if (docs.empty()) throw ValidationError("cannot fit tf-idf on zero documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    const std::set<std::string> uniq(doc.begin(), doc.end());
    for (const auto& t : uniq) ++df[t];
  }
  if (df.empty()) throw ValidationError("cannot fit tf-idf: every document is empty");

  TfIdfModel m;
  m.corpus_size_ = docs.size();
  m.idf_.resize(static_cast<Eigen::Index>(df.size()));
  const double n = static_cast<double>(docs.size());
  Eigen::Index col = 0;
  for (const auto& [token, count] : df) {
    m.vocabulary_.emplace(token, col);
    m.idf_[col] = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    ++col;
  }
  return m;
}

std::optional<Eigen::Index> TfIdfModel::column(const std::string& token) const {
  const auto it = vocabulary_.find(token);
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfIdfModel::vectorize(const TokenList& doc) const {
  std::map<Eigen::Index, double> tf;
  for (const auto& t : doc) {
    if (const auto c = column(t)) tf[*c] += 1.0;
  }
  SparseVector v(static_cast<Eigen::Index>(vocabulary_.size()));
  v.reserve(static_cast<Eigen::Index>(tf.size()));
  for (const auto& [c, count] : tf) v.insertBack(c) = count * idf_[c];
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

std::optional<double> cosine(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return a.dot(b) / (na * nb);
}

EntitySet extract_entities(std::string_view s, const corpus::SensitiveAttributeTable& table) {
  EntitySet out;
  for (const auto& span : corpus::annotate_attributes(s, table)) {
    out.insert({span.category, text::casefold(span.value)});
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace fairprio::analyzers
