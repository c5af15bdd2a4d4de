// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic replay backend. Given a benchmark and a latency table it
// produces the clock readings and SASS trace a device following the table
// would produce, so the whole pipeline runs without a GPU.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptxlat/analysis.hpp"
#include "ptxlat/codegen.hpp"
#include "ptxlat/isa_model.hpp"
#include "ptxlat/trace.hpp"

namespace ptxlat::vdev {

struct MemoryHierarchyModel {
  std::uint64_t l1_bytes = codegen::DeviceCapacities{}.l1_bytes;
  std::uint64_t l2_bytes = codegen::DeviceCapacities{}.l2_bytes;
  // global, l2, l1, and optionally shared_load/shared_store.
  std::map<MemoryLevel, Cycles> latencies;

  // Capacities plus the table's memory latencies.
  static MemoryHierarchyModel from_table(const LatencyTable& table, const codegen::DeviceCapacities& capacities = {});

  // Throws ConfigError unless l1 < l2 and global > l2 > l1.
  void validate() const;
};

// cv -> global; cg -> l2 if the footprint fits, else global; ca -> l1, l2 or
// global, whichever is the first level the footprint fits in.
MemoryLevel resolve_level(CacheOp cache_op, std::uint64_t footprint_bytes, const MemoryHierarchyModel& mem);

// Extra cycles charged to a cold timed region of N independent instructions,
// from the reference launch curve: N * (CPI(N) - steady CPI). {1:3, 2:2}.
std::map<std::uint32_t, std::int64_t> default_cold_start_surcharge();

struct VirtualDeviceConfig {
  std::int64_t clock_overhead = 2;
  // Added when 32-bit clock reads pull a barrier into the timed region.
  std::int64_t barrier_penalty = 33;
  std::int64_t shared_followup_cycles = 2;
  std::uint64_t start_clock = 4096;
  std::map<std::uint32_t, std::int64_t> cold_start_surcharge = default_cold_start_surcharge();
  // Used to turn a tensor op's measured GB/s back into elapsed cycles.
  double clock_rate_hz = 1.41e9;
  analysis::WorkMetric work_metric = analysis::operand_bytes;
};

struct SyntheticResult {
  std::uint64_t start_clock = 0;
  std::uint64_t end_clock = 0;
  trace::TraceText trace;
  // Elapsed cycles of a throughput run, for tensor ops with a measured figure.
  std::optional<Cycles> throughput_cycles;
  std::vector<std::string> notes;

  std::uint64_t delta() const noexcept { return end_clock - start_clock; }
  bool operator==(const SyntheticResult&) const = default;
};

// Ranged table records resolve to their minimum on even trials and their
// maximum on odd ones. Throws BackendError when the table lacks a record the
// benchmark needs; the message names the signature.
SyntheticResult run_virtual(const codegen::BenchInfo& bench, const LatencyTable& table,
                            const MemoryHierarchyModel& mem, const VirtualDeviceConfig& cfg = {},
                            std::uint32_t trial = 0);
SyntheticResult run_virtual(const codegen::Microbenchmark& bench, const LatencyTable& table,
                            const MemoryHierarchyModel& mem, const VirtualDeviceConfig& cfg = {},
                            std::uint32_t trial = 0);

// Writes <dir>/<id>.trace and <dir>/<id>.clocks ("CLOCKS <start> <end>", plus
// "THROUGHPUT <cycles>" for tensor ops), the fixture pair read by the replay
// runner.
void write_fixture(const SyntheticResult& result, const std::string& id, const std::filesystem::path& dir);

}  // namespace ptxlat::vdev
