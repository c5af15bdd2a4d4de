// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Turning clock readings into per-instruction cycles, memory latencies,
// tensor-core latencies and throughput, and assembling a latency table.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptxlat/codegen.hpp"
#include "ptxlat/isa_model.hpp"
#include "ptxlat/trace.hpp"

namespace ptxlat::analysis {

using TypePair = std::pair<DataType, DataType>;  // (inputs, accumulator)

// Bytes of work attributed to one mma operation.
using WorkMetric = std::function<double(const TensorCoreOp&)>;

// A, B and C operand bytes consumed by one mma: (m*k + k*n) input elements
// plus m*n accumulator elements.
double operand_bytes(const TensorCoreOp& op);

// GB/s figures listed for the built-in tensor ops.
std::map<TypePair, double> default_theoretical_throughput();

struct AnalysisConfig {
  std::int64_t clock_overhead = 2;
  // Instruction-count benchmarks with count <= warmup_discard are launch-curve
  // samples and do not enter the latency table.
  std::uint32_t warmup_discard = 2;
  std::int64_t shared_followup_cycles = 2;
  double clock_rate_hz = 1.41e9;
  std::map<TypePair, double> theoretical_throughput = default_theoretical_throughput();
  WorkMetric work_metric = operand_bytes;

  // Throws ConfigError on a negative overhead, non-positive clock rate or
  // missing work metric.
  void validate() const;
};

// (end - start - overhead) / count, clamped at 0 (with a note) when the raw
// delta is below the overhead. Throws ValidationError for count 0 or
// end < start.
Cycles compute_cpi(const LatencyMeasurement& m, std::vector<std::string>* notes = nullptr);

struct LaunchCurve {
  std::map<std::uint32_t, Cycles> per_n;
  Cycles steady{0};
  // Smallest N whose CPI equals the CPI at N+1; unset when the series never
  // stabilizes (steady is then the last CPI).
  std::optional<std::uint32_t> steady_from;
  std::vector<std::string> notes;
};

// Keyed by instruction count N.
LaunchCurve launch_overhead_curve(const std::map<std::uint32_t, LatencyMeasurement>& measurements);

// (total_delta - overhead) / loads. Throws ValidationError for loads == 0.
Cycles memory_latency(const Cycles& total_delta, std::uint64_t loads, const AnalysisConfig& cfg = {});

// total_delta - overhead - follow-up, clamped at 0 with a note.
Cycles shared_latency(const Cycles& total_delta, const AnalysisConfig& cfg = {},
                      std::vector<std::string>* notes = nullptr);

// (total_delta - overhead) / (4 * iters). Throws ValidationError for iters == 0.
Cycles tc_latency(const Cycles& total_delta, std::uint64_t iters, const AnalysisConfig& cfg = {});

struct Throughput {
  double measured = 0;  // GB/s
  std::optional<double> theoretical;
  std::optional<double> ratio;
};

// measured = work(op) * op_count / (elapsed_cycles / clock_rate) / 1e9.
// Throws ValidationError when elapsed_cycles <= 0.
Throughput tc_throughput(const TensorCoreOp& op, const Cycles& elapsed_cycles, std::uint64_t op_count,
                         const AnalysisConfig& cfg = {});

// Inverse of tc_throughput: elapsed cycles that yield `gbps` for op_count ops.
Cycles throughput_elapsed_cycles(const TensorCoreOp& op, std::uint64_t op_count, double gbps,
                                 const AnalysisConfig& cfg = {});

// One benchmark after analysis.
struct AnalyzedBenchmark {
  codegen::BenchInfo bench;
  // CPI for ALU, latency for memory/shared/wmma, raw delta for clock overhead.
  Cycles value{0};
  std::optional<trace::MappingReport> mapping;
  std::optional<Throughput> throughput;
  std::vector<std::string> notes;
};

// Derives the per-kind figure from a clock pair. `throughput_cycles` is the
// elapsed time of a throughput run, when one was made.
AnalyzedBenchmark analyze_measurement(const codegen::BenchInfo& bench, std::uint64_t start_clock,
                                      std::uint64_t end_clock, const AnalysisConfig& cfg = {},
                                      std::optional<Cycles> throughput_cycles = std::nullopt);

// Builds a table of measured records. Unmatched mappings are kept and
// flagged; conflicting values for one key widen to a range. 32-bit-clock
// benchmarks and launch-curve samples are skipped with a note in `notes`.
LatencyTable build_latency_table(const std::vector<AnalyzedBenchmark>& results, const AnalysisConfig& cfg = {},
                                 std::vector<std::string>* notes = nullptr);

}  // namespace ptxlat::analysis
