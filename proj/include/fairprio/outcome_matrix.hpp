// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairprio/mr_id.hpp"

namespace fairprio::prioritizer {

enum class Cell : std::uint8_t {
  pass,       // evaluated, labels agree
  violation,  // evaluated, labels differ
  skipped,    // no pair (MR inapplicable to the case)
  errored,    // completion failed
};

/// Per-MR, per-source-case grid of pair outcomes. Rows follow mr_ids,
/// columns follow case_ids (corpus order).
class OutcomeMatrix {
 public:
  using Grid = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  OutcomeMatrix() = default;
  /// All cells start as skipped. Throws ValidationError on duplicate ids.
  OutcomeMatrix(std::vector<MrId> mr_ids, std::vector<std::string> case_ids);

  const std::vector<MrId>& mr_ids() const noexcept { return mr_ids_; }
  const std::vector<std::string>& case_ids() const noexcept { return case_ids_; }
  std::size_t n_mrs() const noexcept { return mr_ids_.size(); }
  std::size_t n_cases() const noexcept { return case_ids_.size(); }

  Cell at(std::size_t mr_row, std::size_t case_col) const;
  void set(std::size_t mr_row, std::size_t case_col, Cell c);

  /// Row of an MR id. Throws ValidationError when absent.
  std::size_t row_of(MrId id) const;
  std::size_t col_of(const std::string& case_id) const;

  bool violation(std::size_t r, std::size_t c) const { return at(r, c) == Cell::violation; }
  /// Evaluated pair: pass or violation.
  bool applicable(std::size_t r, std::size_t c) const {
    const Cell x = at(r, c);
    return x == Cell::pass || x == Cell::violation;
  }

  /// Column indices of violating cases of a row.
  std::vector<std::size_t> faults(std::size_t r) const;

  friend bool operator==(const OutcomeMatrix& a, const OutcomeMatrix& b) {
    return a.mr_ids_ == b.mr_ids_ && a.case_ids_ == b.case_ids_ && a.cells_ == b.cells_;
  }

 private:
  std::vector<MrId> mr_ids_;
  std::vector<std::string> case_ids_;
  Grid cells_;
};

}  // namespace fairprio::prioritizer
