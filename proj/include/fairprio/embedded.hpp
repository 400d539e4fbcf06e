// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace fairprio::detail {

/// Contents of a data/ file compiled into the library, by file name.
std::string_view embedded_file(std::string_view name);

}  // namespace fairprio::detail
