// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairprio {

enum class ErrorKind {
  validation,
  parse,
  transport,
  replay_miss,
  execution,
};

/// Base of every exception thrown by the library. The kind drives the CLI
/// exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what)
      : Error(ErrorKind::transport, what) {}
};

class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(const std::string& key)
      : Error(ErrorKind::replay_miss, "replay miss for cassette key " + key),
        keys_{key} {}
  /// Summary of several misses; `keys` must not be empty.
  explicit ReplayMissError(std::vector<std::string> keys)
      : Error(ErrorKind::replay_miss, summary(keys)), keys_(std::move(keys)) {}

  const std::string& key() const noexcept { return keys_.front(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  static std::string summary(const std::vector<std::string>& keys) {
    std::string s = std::to_string(keys.size()) + " cassette key(s) missing in replay mode:";
    for (const auto& k : keys) s += "\n  " + k;
    return s;
  }

  std::vector<std::string> keys_;
};

class ExecutionError : public Error {
 public:
  explicit ExecutionError(const std::string& what)
      : Error(ErrorKind::execution, what) {}
};

}  // namespace fairprio
