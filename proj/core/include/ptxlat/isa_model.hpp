// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Shared data model: PTX data types, instructions under test, memory levels,
// tensor-core operations, SASS expansions and latency tables.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

// Under C++20 rewritten comparisons, Boost 1.74's mixed rational/integer
// operator== picks its own reversed form and recurses forever. Exact
// non-template overloads win overload resolution and end the recursion.
namespace boost {
inline constexpr bool operator==(const rational<std::int64_t>& a, int b) noexcept {
  return a.denominator() == 1 && a.numerator() == b;
}
inline constexpr bool operator==(const rational<std::int64_t>& a, long b) noexcept {
  return a.denominator() == 1 && a.numerator() == b;
}
inline constexpr bool operator==(const rational<std::int64_t>& a, long long b) noexcept {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace ptxlat {

// Cycle counts are exact rationals so that (delta - overhead) / count never
// loses precision before it is compared against a table entry.
using Cycles = boost::rational<std::int64_t>;

// "2", "7/3". Negative values are printed with a leading '-'.
std::string format_cycles(const Cycles& value);
Cycles parse_cycles(std::string_view text);

// ---------------------------------------------------------------------------
// Data types
// ---------------------------------------------------------------------------

enum class DataType : std::uint8_t {
  u16, u32, u64, s16, s32, s64, f16, bf16, tf32, f32, f64,
  b16, b32, b64, u8, u4, pred,
};

inline constexpr std::array kAllDataTypes = {
    DataType::u16,  DataType::u32, DataType::u64, DataType::s16,
    DataType::s32,  DataType::s64, DataType::f16, DataType::bf16,
    DataType::tf32, DataType::f32, DataType::f64, DataType::b16,
    DataType::b32,  DataType::b64, DataType::u8,  DataType::u4,
    DataType::pred,
};

// Storage width in bits; tf32 occupies a 32-bit container.
int bit_width(DataType type) noexcept;
std::string_view to_string(DataType type) noexcept;
std::optional<DataType> parse_data_type(std::string_view text) noexcept;

// Strict weak order by bit width, ties broken by declaration order so the
// ordering is total and stable.
bool narrower_than(DataType a, DataType b) noexcept;

bool is_float(DataType type) noexcept;
bool is_signed_int(DataType type) noexcept;

// ---------------------------------------------------------------------------
// Instructions under test
// ---------------------------------------------------------------------------

enum class Dependency : std::uint8_t { independent, dependent };

inline constexpr std::uint32_t kDefaultInstructionCount = 3;

struct InstructionSpec {
  std::string opcode;
  std::vector<std::string> modifiers;
  DataType dtype = DataType::u32;
  Dependency dependency = Dependency::independent;
  std::uint32_t count = kDefaultInstructionCount;

  // "mad.lo.u32"
  std::string ptx_name() const;
  // Table key: ptx_name plus ":dep" for dependent chains.
  std::string key() const;
  // Full round-trippable form: key plus "x<count>" when count differs from
  // the default.
  std::string signature() const;

  bool operator==(const InstructionSpec&) const = default;
};

// Accepts "<opcode>[.<modifier>...].<dtype>[:dep|:indep][[:]x<count>]".
// Throws ParseError naming the offending token.
InstructionSpec parse_signature(std::string_view text);

// ---------------------------------------------------------------------------
// Memory
// ---------------------------------------------------------------------------

enum class MemoryLevel : std::uint8_t { global, l2, l1, shared_load, shared_store };

inline constexpr std::array kAllMemoryLevels = {
    MemoryLevel::global, MemoryLevel::l2, MemoryLevel::l1,
    MemoryLevel::shared_load, MemoryLevel::shared_store,
};

enum class CacheOp : std::uint8_t { cv, cg, ca, none };

std::string_view to_string(MemoryLevel level) noexcept;
std::optional<MemoryLevel> parse_memory_level(std::string_view text) noexcept;
std::string_view to_string(CacheOp op) noexcept;
std::optional<CacheOp> parse_cache_op(std::string_view text) noexcept;

// Load cache operator used to target a level: global->cv, l2->cg, l1->ca,
// shared levels->none.
CacheOp cache_operator(MemoryLevel level) noexcept;

// ---------------------------------------------------------------------------
// Tensor cores
// ---------------------------------------------------------------------------

enum class Layout : std::uint8_t { row, col };

std::string_view to_string(Layout layout) noexcept;
std::optional<Layout> parse_layout(std::string_view text) noexcept;

struct TensorShape {
  int m = 0;
  int n = 0;
  int k = 0;

  std::string to_string() const;  // "m16n16k16"
  bool operator==(const TensorShape&) const = default;
};

std::optional<TensorShape> parse_tensor_shape(std::string_view text) noexcept;

struct TensorShapeSupport {
  DataType in_type;
  DataType acc_type;
  std::vector<TensorShape> shapes;
};

// Supported (inputs, accumulator) pairs and their WMMA shapes on the modeled
// architecture.
std::span<const TensorShapeSupport> supported_tensor_shapes();
bool is_supported_tensor_shape(const TensorShape& shape, DataType in_type,
                               DataType acc_type);
// Human-readable list for error messages.
std::string describe_supported_tensor_shapes();

struct TensorCoreOp {
  TensorShape shape;
  DataType in_type = DataType::f16;
  DataType acc_type = DataType::f16;
  Layout layout_a = Layout::row;
  Layout layout_b = Layout::row;
  Layout layout_c = Layout::row;
  std::string ptx_instruction;  // e.g. wmma.mma.sync.aligned.row.row.m16n16k16.f16.f16
  std::string sass_opcode;      // e.g. HMMA.16816.F16
  int sass_count = 1;
  int per_sass_cycles = 1;
  int iters = 1;
  // GB/s figures; unset when not known.
  std::optional<double> measured_throughput;
  std::optional<double> theoretical_throughput;

  int total_cycles() const noexcept { return sass_count * per_sass_cycles; }
  // "m16n16k16.f16.f16"; identifies the op inside a table.
  std::string signature() const;

  bool operator==(const TensorCoreOp&) const = default;
};

// Parses "m16n16k16.f16.f16" into shape and types.
struct TensorSignature {
  TensorShape shape;
  DataType in_type;
  DataType acc_type;
};
TensorSignature parse_tensor_signature(std::string_view text);

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

struct LatencyMeasurement {
  std::uint64_t start_clock = 0;
  std::uint64_t end_clock = 0;
  std::uint32_t instruction_count = 1;
  std::uint64_t clock_overhead = 0;

  bool operator==(const LatencyMeasurement&) const = default;
};

// ---------------------------------------------------------------------------
// PTX -> SASS expansion
// ---------------------------------------------------------------------------

struct SassTerm {
  std::string opcode;
  std::uint32_t multiplicity = 1;

  bool operator==(const SassTerm&) const = default;
};

using SassExpansion = std::vector<SassTerm>;

// Textual notation used in tables and reports:
//   "UISETP.LT.U32.AND+2*USEL"            single expansion
//   "FADD | IMAD.MOV.U32"                 primary plus alternatives
//   "multiple"  /  "multiple(MUFU.RSQ)"   opaque multi-instruction sequence
struct SassMapping {
  std::string ptx_signature;
  SassExpansion expansion;
  std::vector<SassExpansion> alternatives;
  bool multi_instruction = false;
  // Opcodes known to appear in an opaque sequence.
  std::vector<std::string> hints;

  std::uint32_t total_multiplicity() const noexcept;
  std::string notation() const;

  bool operator==(const SassMapping&) const = default;
};

std::string format_expansion(const SassExpansion& expansion);
SassExpansion parse_expansion(std::string_view text);
SassMapping parse_sass_mapping(std::string ptx_signature, std::string_view notation);

// ---------------------------------------------------------------------------
// Latency tables
// ---------------------------------------------------------------------------

enum class Source : std::uint8_t { measured, paper_seed };

std::string_view to_string(Source source) noexcept;
std::optional<Source> parse_source(std::string_view text) noexcept;

struct LatencyRecord {
  std::string signature;  // InstructionSpec::key()
  SassMapping mapping;
  Cycles cycles_min{0};
  Cycles cycles_max{0};
  bool approximate = false;
  Source source = Source::measured;
  bool mapping_mismatch = false;
  std::string note;

  bool is_point() const noexcept { return cycles_min == cycles_max; }
  // Throws ValidationError when an invariant does not hold.
  void validate() const;

  bool operator==(const LatencyRecord&) const = default;
};

struct MemoryLatency {
  Cycles cycles{0};
  bool approximate = false;

  bool operator==(const MemoryLatency&) const = default;
};

class LatencyTable {
 public:
  LatencyTable() = default;
  explicit LatencyTable(std::string architecture) : architecture_(std::move(architecture)) {}

  const std::string& architecture() const noexcept { return architecture_; }
  void set_architecture(std::string architecture) { architecture_ = std::move(architecture); }

  // Records keep insertion order; signatures are unique.
  const std::vector<LatencyRecord>& records() const noexcept { return records_; }
  const LatencyRecord* find(std::string_view signature) const noexcept;
  // Throws ValidationError on a duplicate signature or an invalid record.
  void add(LatencyRecord record);
  // Adds or replaces.
  void put(LatencyRecord record);
  bool remove(std::string_view signature);

  const std::map<MemoryLevel, MemoryLatency>& memory() const noexcept { return memory_; }
  void set_memory(MemoryLevel level, MemoryLatency latency) { memory_[level] = latency; }
  std::optional<Cycles> memory_cycles(MemoryLevel level) const;

  const std::vector<TensorCoreOp>& tensor_ops() const noexcept { return tensor_ops_; }
  const TensorCoreOp* find_tensor_op(std::string_view signature) const noexcept;
  // Throws ValidationError on a duplicate op signature.
  void add_tensor_op(TensorCoreOp op);
  void put_tensor_op(TensorCoreOp op);

  std::optional<std::int64_t> clock_overhead() const noexcept { return clock_overhead_; }
  void set_clock_overhead(std::optional<std::int64_t> cycles) { clock_overhead_ = cycles; }

  bool empty() const noexcept {
    return records_.empty() && memory_.empty() && tensor_ops_.empty() && !clock_overhead_;
  }

  bool operator==(const LatencyTable&) const = default;

 private:
  std::string architecture_;
  std::vector<LatencyRecord> records_;
  std::map<MemoryLevel, MemoryLatency> memory_;
  std::vector<TensorCoreOp> tensor_ops_;
  std::optional<std::int64_t> clock_overhead_;
};

// ---------------------------------------------------------------------------
// Built-in A100 reference data
// ---------------------------------------------------------------------------

// Instruction, memory and tensor-core latencies measured on the A100.
LatencyTable seed_paper_table();

// Average CPI of independent add.u32 for N = 1..4 instructions in the timed
// region: {1:5, 2:3, 3:2, 4:2}.
const std::map<std::uint32_t, Cycles>& reference_launch_curve();

struct DependencyPair {
  std::string ptx_name;
  Cycles dependent;
  Cycles independent;
};
// The five instructions measured with and without a dependent chain.
std::span<const DependencyPair> reference_dependency_pairs();

}  // namespace ptxlat
