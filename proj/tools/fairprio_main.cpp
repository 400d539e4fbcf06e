// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/commands.hpp"

int main(int argc, char** argv) { return fairprio::cli::main(argc, argv); }
