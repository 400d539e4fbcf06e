// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace fairprio {

/// Metamorphic relation identifier "MR<n>". Orders numerically, so MR2 < MR10.
class MrId {
 public:
  constexpr MrId() = default;
  explicit constexpr MrId(int number) : number_(number) {}

  /// Accepts "MR7" or "mr7". Throws ValidationError otherwise.
  static MrId parse(std::string_view s);

  constexpr int number() const noexcept { return number_; }
  std::string str() const { return "MR" + std::to_string(number_); }

  friend constexpr auto operator<=>(MrId, MrId) = default;

 private:
  int number_ = 0;
};

}  // namespace fairprio
