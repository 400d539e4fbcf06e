// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fairprio/corpus.hpp"

namespace fairprio::analyzers {

/// Lowercase word tokens. Only produced by tokenize().
using TokenList = std::vector<std::string>;

/// Case-folds, then splits on every maximal run of non-alphanumeric bytes.
TokenList tokenize(std::string_view text);

using SparseVector = Eigen::SparseVector<double>;

/// Smoothed TF-IDF: idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw term counts,
/// L2-normalized document vectors. Vocabulary columns follow the
/// lexicographic order of the tokens.
class TfIdfModel {
 public:
  /// Throws ValidationError when `docs` is empty or has no tokens at all.
  static TfIdfModel fit(const std::vector<TokenList>& docs);

  const std::map<std::string, Eigen::Index>& vocabulary() const noexcept { return vocabulary_; }
  const Eigen::VectorXd& idf() const noexcept { return idf_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }

  std::optional<Eigen::Index> column(const std::string& token) const;

  /// tf(t) * idf(t) per in-vocabulary token, L2-normalized unless zero.
  SparseVector vectorize(const TokenList& doc) const;

 private:
  std::map<std::string, Eigen::Index> vocabulary_;
  Eigen::VectorXd idf_;
  std::size_t corpus_size_ = 0;
};

/// Cosine of two vectors, or nullopt when either has zero norm.
template <typename DerivedA, typename DerivedB>
std::optional<typename DerivedA::Scalar> cosine(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return std::nullopt;
  return a.dot(b) / (na * nb);
}

std::optional<double> cosine(const SparseVector& a, const SparseVector& b);

struct Entity {
  std::string category;
  std::string value;  // case-folded

  friend auto operator<=>(const Entity&, const Entity&) = default;
};
using EntitySet = std::set<Entity>;

/// Gazetteer matches of the text as a (category, folded value) set.
EntitySet extract_entities(std::string_view text,
                           const corpus::SensitiveAttributeTable& table);

/// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace fairprio::analyzers
