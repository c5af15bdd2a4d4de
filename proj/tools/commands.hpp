// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace ptxlat::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // benchmark or verification failure
inline constexpr int kExitUsage = 2;    // usage or configuration error

struct GenOptions {
  std::string spec;
  bool all = false;
  std::string kind;
  std::filesystem::path out = ".";
  std::string clock = "64";
  std::uint32_t iters = 64;
  std::optional<std::uint64_t> elements;
  std::optional<std::uint64_t> l1_bytes;
  std::optional<std::uint64_t> l2_bytes;
  std::string table;
};

struct ValidateOptions {
  std::vector<std::filesystem::path> files;
};

struct RunOptions {
  std::filesystem::path manifest = "manifest.json";
  std::string backend = "virtual";
  std::string table;
  std::filesystem::path out = "results.json";
  std::filesystem::path fixtures;
  std::filesystem::path toolchain;
  std::uint32_t trials = 1;
  std::size_t jobs = 1;
};

struct AnalyzeOptions {
  std::filesystem::path results = "results.json";
  std::filesystem::path out = "table.json";
  std::string table;
  std::string arch;
};

struct VerifyOptions {
  std::filesystem::path trace;
  std::string bench;
  std::filesystem::path manifest;
  std::string table;
  bool lenient = false;
};

struct ReportOptions {
  std::string table;
  std::string format = "md";
  std::filesystem::path out;
};

struct DiffOptions {
  std::string a;
  std::string b;
};

struct SeedOptions {
  std::filesystem::path out;
};

// Each returns an exit code; library errors propagate to main().
int cmd_gen(const GenOptions& opts, const ToolConfig& cfg);
int cmd_validate(const ValidateOptions& opts);
int cmd_run(const RunOptions& opts, const ToolConfig& cfg);
int cmd_analyze(const AnalyzeOptions& opts, const ToolConfig& cfg);
int cmd_verify_mapping(const VerifyOptions& opts, const ToolConfig& cfg);
int cmd_report(const ReportOptions& opts);
int cmd_diff(const DiffOptions& opts);
int cmd_seed(const SeedOptions& opts);

}  // namespace ptxlat::cli
