// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptxlat {

// Base for every error the library throws. The CLI maps subclasses onto exit
// codes, so new failure modes should derive from the closest existing kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input: signatures, mapping notation, table files, traces.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string token = {},
             std::size_t line = 0)
      : Error(message), token_(std::move(token)), line_(line) {}

  const std::string& token() const noexcept { return token_; }
  // 1-based; 0 when the input has no line structure.
  std::size_t line() const noexcept { return line_; }

 private:
  std::string token_;
  std::size_t line_;
};

// Invalid option combinations, sizing rule violations, bad command templates.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The generator cannot emit a kernel for the requested instruction or shape.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// A trace or kernel lacks the clock-read structure every benchmark relies on.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A value violates a data-model invariant (e.g. cycles_min > cycles_max).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A persisted file was written by an incompatible schema version.
class MigrationError : public Error {
 public:
  using Error::Error;
};

// Execution failed: missing fixture, external command failure or timeout,
// missing table record in the virtual device.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, std::string captured_output = {})
      : Error(message), output_(std::move(captured_output)) {}

  const std::string& captured_output() const noexcept { return output_; }

 private:
  std::string output_;
};

}  // namespace ptxlat
