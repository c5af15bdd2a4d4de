// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// One execution contract over three backends: the virtual device, replay of
// recorded fixtures, and an external toolchain driven by command templates.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ptxlat/analysis.hpp"
#include "ptxlat/codegen.hpp"
#include "ptxlat/isa_model.hpp"
#include "ptxlat/trace.hpp"
#include "ptxlat/virtual_device.hpp"

namespace ptxlat::runner {

enum class Backend : std::uint8_t { virtual_device, replay, external };

// "virtual", "replay", "external".
std::string_view to_string(Backend backend) noexcept;
std::optional<Backend> parse_backend(std::string_view text) noexcept;

// Command templates with {input} and {output} placeholders, run through
// /bin/sh -c inside working_dir:
//   compile: {input} = kernel source, {output} = executable to produce
//   launch:  {input} = executable, {output} = scratch file; stdout must carry
//            a line "CLOCKS <start> <end>" (one per trial)
//   trace:   {input} = executable, {output} = SASS trace file to produce
// The commands also see PTXLAT_BENCH_ID, PTXLAT_BENCH_KIND and
// PTXLAT_TIMED_COUNT in their environment.
struct ExternalToolchainConfig {
  std::string compile_command_template;
  std::string launch_command_template;
  std::string trace_command_template;
  std::filesystem::path working_dir = ".";
  double timeout_seconds = 120;

  // Throws ConfigError when a template is empty or lacks a placeholder, or
  // the timeout is not positive.
  void validate() const;

  // Keys "compile", "launch", "trace", "working_dir", "timeout_seconds".
  static ExternalToolchainConfig from_json_text(std::string_view text);
  static ExternalToolchainConfig from_file(const std::filesystem::path& path);
  // PTXLAT_COMPILE_CMD, PTXLAT_LAUNCH_CMD, PTXLAT_TRACE_CMD, PTXLAT_WORKDIR,
  // PTXLAT_TIMEOUT. Unset variables keep the values already in `base`.
  static ExternalToolchainConfig from_environment(ExternalToolchainConfig base);
  static ExternalToolchainConfig from_environment();
};

// Substitutes {input} and {output}; both are shell-quoted.
std::string expand_template(std::string_view tmpl, const std::filesystem::path& input,
                            const std::filesystem::path& output);

struct RunConfig {
  Backend backend = Backend::virtual_device;
  // Reference table for the virtual device.
  LatencyTable table = seed_paper_table();
  vdev::MemoryHierarchyModel memory = vdev::MemoryHierarchyModel::from_table(seed_paper_table());
  vdev::VirtualDeviceConfig device;
  // Trials per benchmark. The virtual backend runs at least two for ranged
  // records so that both ends of the range are observed.
  std::uint32_t trials = 1;
  std::filesystem::path fixture_dir = ".";
  ExternalToolchainConfig external;
  // Parallel sweep entries; 0 picks the hardware concurrency.
  std::size_t concurrency = 1;
};

struct Trial {
  std::uint64_t start_clock = 0;
  std::uint64_t end_clock = 0;
  std::optional<Cycles> throughput_cycles;

  std::uint64_t delta() const noexcept { return end_clock - start_clock; }
  bool operator==(const Trial&) const = default;
};

// Either an in-memory trace or the path of a trace file.
using TraceSource = std::variant<trace::TraceText, std::filesystem::path>;

struct RunResult {
  codegen::BenchInfo bench;
  Backend backend = Backend::virtual_device;
  std::vector<Trial> trials;
  std::optional<TraceSource> trace;
  std::vector<std::string> diagnostics;
  // Set when the run failed; trials and trace are then empty.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
  const std::string& bench_id() const noexcept { return bench.id; }
  std::uint64_t start_clock() const { return trials.at(0).start_clock; }
  std::uint64_t end_clock() const { return trials.at(0).end_clock; }

  bool operator==(const RunResult&) const = default;
};

// Runs one benchmark. Errors propagate as exceptions: ConfigError for bad
// backend configuration, BackendError for a missing fixture (the message
// names the expected path) and for failing or timed-out external commands
// (carrying their output), ParseError for malformed clock or trace files.
RunResult run(const codegen::BenchInfo& bench, const RunConfig& config);
// As above; the external backend compiles `source` instead of regenerating it.
RunResult run(const codegen::Microbenchmark& bench, const RunConfig& config);

// Runs every benchmark, preserving order. A failing entry is recorded in its
// own result and never affects the others.
std::vector<RunResult> sweep(const std::vector<codegen::BenchInfo>& benches, const RunConfig& config);

// Reads "<start> <end>" or "CLOCKS <start> <end>" lines, one per trial. A
// "THROUGHPUT <cycles>" line attaches a throughput run's elapsed cycles to
// the trial before it. Blank and '#' lines are skipped. Throws ParseError on
// anything else or when no trial is present.
std::vector<Trial> parse_clocks(std::string_view text, std::string_view source = "clocks");

// Extracts every "CLOCKS <start> <end>" line from command output.
std::vector<Trial> find_clock_lines(std::string_view output);

// ---------------------------------------------------------------------------
// Results files
// ---------------------------------------------------------------------------

std::string results_to_text(const std::vector<RunResult>& results);
// Relative trace paths resolve against `base_dir`.
std::vector<RunResult> results_from_text(std::string_view text, const std::filesystem::path& base_dir = {});
void write_results(const std::vector<RunResult>& results, const std::filesystem::path& path);
std::vector<RunResult> read_results(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Analysis over run results
// ---------------------------------------------------------------------------

struct AnalysisRun {
  std::vector<analysis::AnalyzedBenchmark> analyzed;
  LatencyTable table;
  std::vector<std::string> notes;
  // Entries that could not be analyzed (run failure, unreadable trace).
  std::vector<std::string> failures;
};

// Verifies each trace against `reference` (the table supplying expected SASS
// for instructions), analyzes every trial and builds the measured table. A
// successful clock-overhead run replaces cfg.clock_overhead for the others.
AnalysisRun analyze_results(const std::vector<RunResult>& results, const LatencyTable& reference,
                            analysis::AnalysisConfig cfg = {});

}  // namespace ptxlat::runner
