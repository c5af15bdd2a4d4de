// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Microbenchmark generation. Every kernel reads the clock twice around a
// timed region and stores both the clock delta and the timed results so the
// compiler cannot drop the region.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ptxlat/isa_model.hpp"

namespace ptxlat::codegen {

enum class BenchKind : std::uint8_t { clock_overhead, alu, memory, shared, wmma };
enum class ClockWidth : std::uint8_t { bits32, bits64 };
enum class SharedDirection : std::uint8_t { load, store };
// shuffled: seeded random single cycle. strided: next = (i + stride) mod n.
enum class ChaseLayout : std::uint8_t { shuffled, strided };

std::string_view to_string(BenchKind kind) noexcept;
std::optional<BenchKind> parse_bench_kind(std::string_view text) noexcept;
std::string_view to_string(ClockWidth width) noexcept;
std::optional<ClockWidth> parse_clock_width(std::string_view text) noexcept;
std::string_view to_string(ChaseLayout layout) noexcept;
std::optional<ChaseLayout> parse_chase_layout(std::string_view text) noexcept;

inline constexpr std::uint32_t kChaseUnroll = 4;
inline constexpr std::uint64_t kDefaultChaseSeed = 0x5eed;
inline constexpr std::uint32_t kDefaultWmmaIters = 64;

struct PointerChaseConfig {
  std::uint64_t element_count = 1024;
  std::uint32_t element_bytes = 8;
  CacheOp cache_op = CacheOp::cv;
  std::uint32_t unroll = kChaseUnroll;
  ChaseLayout layout = ChaseLayout::shuffled;
  std::uint64_t stride = 1;
  std::uint64_t seed = kDefaultChaseSeed;

  std::uint64_t footprint_bytes() const noexcept { return element_count * element_bytes; }
  // Throws ConfigError: unroll != 4, count not a positive multiple of the
  // unroll, element size other than 8 bytes, stride sharing a factor with the
  // element count.
  void validate() const;

  bool operator==(const PointerChaseConfig&) const = default;
};

struct DeviceCapacities {
  std::uint64_t l1_bytes = 192ull * 1024;
  std::uint64_t l2_bytes = 40ull * 1024 * 1024;

  bool operator==(const DeviceCapacities&) const = default;
};

// What a benchmark measures: nothing (clock overhead), an instruction, a
// memory level (including shared_load/shared_store), or a tensor-core op.
using BenchTarget = std::variant<std::monostate, InstructionSpec, MemoryLevel, TensorCoreOp>;

struct BenchInfo {
  std::string id;
  BenchKind kind = BenchKind::alu;
  BenchTarget target;
  // Executions of the measured instruction inside the clock window.
  std::uint64_t timed_count = 0;
  // Divisor applied to (delta - overhead) to get a per-instruction figure.
  std::uint64_t divisor = 1;
  ClockWidth clock_width = ClockWidth::bits64;
  std::optional<PointerChaseConfig> chase;
  // Full PTX opcode counted by the validator (empty: count everything).
  std::string timed_op;
  std::uint32_t iters = 0;
  // Shared-memory kernels carry a dependent follow-up instruction whose cost
  // the analysis subtracts.
  bool subtract_followup = false;

  const InstructionSpec* instruction() const noexcept { return std::get_if<InstructionSpec>(&target); }
  const MemoryLevel* memory_level() const noexcept { return std::get_if<MemoryLevel>(&target); }
  const TensorCoreOp* tensor_op() const noexcept { return std::get_if<TensorCoreOp>(&target); }
  // File name for the generated source: id + ".ptx" (".cu" for wmma).
  std::string file_name() const;

  bool operator==(const BenchInfo&) const = default;
};

struct Microbenchmark {
  BenchInfo info;
  std::string source_text;
};

Microbenchmark gen_clock_overhead(ClockWidth clock_width = ClockWidth::bits64);

// Throws GenerationError for unsupported opcodes (the message lists the
// supported set), count == 0, or dependent chains whose result cannot feed
// the next instruction.
Microbenchmark gen_alu(const InstructionSpec& spec, ClockWidth clock_width = ClockWidth::bits64);

// Throws ConfigError when the level is not a cached global level, the cache
// operator does not target the level, or the footprint breaks the sizing
// rule (global > L2 capacity, L2 < L2 capacity, L1 < L1 capacity).
Microbenchmark gen_memory(MemoryLevel level, const PointerChaseConfig& chase,
                          const DeviceCapacities& capacities = {},
                          ClockWidth clock_width = ClockWidth::bits64);

Microbenchmark gen_shared(SharedDirection direction, ClockWidth clock_width = ClockWidth::bits64);

// Throws GenerationError for unsupported shape/type combinations or iters == 0.
Microbenchmark gen_wmma(const TensorCoreOp& op, std::uint32_t iters,
                        ClockWidth clock_width = ClockWidth::bits64);

// next[i] is the index visited after i; the chain is a single cycle through
// every element. Deterministic for a given config.
std::vector<std::uint64_t> build_chase(const PointerChaseConfig& config);

// Smallest conforming chase for a level: 1024 elements for l1/l2, and the
// smallest multiple of the unroll whose footprint exceeds L2 for global.
PointerChaseConfig default_chase(MemoryLevel level, const DeviceCapacities& capacities = {});

std::span<const std::string_view> supported_alu_opcodes();
bool supports_dependent_chain(const InstructionSpec& spec);

// Looks up the table's op for the (inputs, accumulator) pair of a
// "m16n16k16.f16.f16" signature and retargets it to the requested shape.
TensorCoreOp tensor_op_for(std::string_view signature, const LatencyTable& table);

// "wmma.mma.sync.aligned.<a>.<b>.<shape>..." for ops without an explicit name.
std::string default_ptx_instruction(const TensorCoreOp& op);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
  std::size_t line = 0;  // 1-based
  std::string token;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  bool wmma_descriptor = false;
  std::vector<ValidationIssue> issues;
  std::size_t instruction_count = 0;
  // Static instruction counts relative to the clock window (clock reads
  // themselves excluded).
  std::size_t inside_window = 0;
  std::size_t outside_window = 0;
  // Dynamic executions of timed_op inside the window; unset when a loop
  // bound is not statically known.
  std::optional<std::uint64_t> timed_count;
  std::optional<std::uint64_t> declared_timed_count;
  std::string timed_op;
  std::vector<std::string> notes;

  std::string summary() const;
};

// Validates the generated-PTX subset (or a WMMA source descriptor when the
// header declares kind=wmma). Problems are reported, never thrown.
ValidationReport validate_ptx(std::string_view text);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct Manifest {
  DeviceCapacities capacities;
  std::vector<BenchInfo> benchmarks;

  const BenchInfo* find(std::string_view id) const noexcept;
  // Adds or replaces by id.
  void put(BenchInfo info);

  bool operator==(const Manifest&) const = default;
};

std::string manifest_to_text(const Manifest& manifest);
Manifest manifest_from_text(std::string_view text);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

// Regenerates the kernel a manifest entry describes.
Microbenchmark regenerate(const BenchInfo& info, const DeviceCapacities& capacities = {});

// Writes <dir>/<file_name> and returns the path.
std::filesystem::path write_kernel(const Microbenchmark& bench, const std::filesystem::path& dir);

// Rebuilds benchmark metadata from an id produced by the generator
// ("add.u32.alu", "l2.memory", "m16n16k16.f16.f16.wmma", "clock.clock_overhead",
// any of them with a "-clk32" suffix). Memory ids use default_chase().
BenchInfo bench_from_id(std::string_view id, const LatencyTable& table,
                        const DeviceCapacities& capacities = {});

}  // namespace ptxlat::codegen
