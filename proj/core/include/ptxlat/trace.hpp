// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// SASS trace parsing and PTX-to-SASS mapping verification.
//
// A trace line is
//
//   [<index>:] [@P0 | @!P0] OPCODE[.MOD...] [operand, operand, ...] [;]
//
// Blank lines and lines starting with '#' are ignored.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptxlat/codegen.hpp"
#include "ptxlat/isa_model.hpp"

namespace ptxlat::trace {

enum class EventKind : std::uint8_t { clock_read, barrier, instruction };

std::string_view to_string(EventKind kind) noexcept;

struct TraceEvent {
  std::size_t line = 0;  // 1-based source line
  std::optional<std::uint64_t> index;
  std::string predicate;  // "@P0", "@!P1" or empty
  std::string opcode;
  std::vector<std::string> operands;
  EventKind kind = EventKind::instruction;

  bool is_clock_read() const noexcept { return kind == EventKind::clock_read; }
  bool is_barrier() const noexcept { return kind == EventKind::barrier; }

  bool operator==(const TraceEvent&) const = default;
};

// CS2R/S2R reading an SR_CLOCK* register is a clock read; BAR* is a barrier.
// NOP is reported as an instruction here and reinterpreted by the verifier
// for WMMA benchmarks, where it is the warp-sync marker.
EventKind event_kind(std::string_view opcode, const std::vector<std::string>& operands) noexcept;

enum class InstructionClass : std::uint8_t {
  integer, float_, double_, half, memory, tensor, control, clock, barrier, other,
};

std::string_view to_string(InstructionClass c) noexcept;

// Opcode-family class. NOP counts as a barrier only when `wmma_region` is
// set; unknown opcodes are `other`.
InstructionClass classify(const TraceEvent& event, bool wmma_region = false) noexcept;
InstructionClass classify(std::string_view opcode) noexcept;

struct ParseOptions {
  // Strict parsing throws ParseError on a malformed line; lenient parsing
  // skips it and records a note.
  bool strict = true;
};

struct ParseNote {
  std::size_t line = 0;
  std::string message;
};

// Parses a single line. Returns nullopt for blank, comment and (lenient)
// skipped lines.
std::optional<TraceEvent> parse_line(std::string_view line, std::size_t line_no, const ParseOptions& options,
                                     std::vector<ParseNote>* notes = nullptr);

std::vector<TraceEvent> parse_trace(std::string_view text, const ParseOptions& options = {},
                                    std::vector<ParseNote>* notes = nullptr);

// Positions (into `events`) of the first and second clock reads. Throws
// StructuralError when there are fewer or more than two.
std::pair<std::size_t, std::size_t> timed_region(const std::vector<TraceEvent>& events);

// Events strictly between the two clock reads. Throws StructuralError when
// there are fewer or more than two clock reads.
std::vector<TraceEvent> extract_timed_region(const std::vector<TraceEvent>& events);

// ---------------------------------------------------------------------------
// Compact trace text
// ---------------------------------------------------------------------------

// A trace as blocks of lines with repeat counts, so that a pointer chase over
// millions of elements does not need millions of strings in memory. Lines
// are stored without the index prefix; writing numbers them.
class TraceText {
 public:
  struct Block {
    std::vector<std::string> lines;
    std::uint64_t repeat = 1;

    bool operator==(const Block&) const = default;
  };

  void add_line(std::string line);
  void add_repeated(std::vector<std::string> lines, std::uint64_t repeat);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::uint64_t line_count() const noexcept;
  bool empty() const noexcept { return blocks_.empty(); }

  // Writes "<index>: <line>" per line.
  void write(std::ostream& out) const;
  void write_file(const std::filesystem::path& path) const;
  std::string str() const;

  bool operator==(const TraceText&) const = default;

 private:
  std::vector<Block> blocks_;
};

// Streams every event of a trace to the callback.
void for_each_event(const TraceText& trace, const ParseOptions& options,
                    const std::function<void(const TraceEvent&)>& fn, std::vector<ParseNote>* notes = nullptr);
void for_each_event(std::istream& in, const ParseOptions& options, const std::function<void(const TraceEvent&)>& fn,
                    std::vector<ParseNote>* notes = nullptr);

// ---------------------------------------------------------------------------
// Mapping verification
// ---------------------------------------------------------------------------

struct MappingReport {
  bool matched = false;
  std::string bench_id;
  SassMapping expected;
  std::uint64_t timed_count = 0;
  // SASS opcode multiplicities inside the timed region, in first-seen order.
  std::vector<std::pair<std::string, std::uint64_t>> observed;
  // Opcodes that no expected expansion accounts for, and barriers.
  std::vector<std::string> extras;
  std::vector<std::string> notes;
  std::vector<ParseNote> parse_notes;

  // Observed opcodes divided by the timed count when they divide evenly,
  // otherwise the raw totals; used as the table mapping for mismatches.
  SassMapping observed_mapping() const;
  std::string summary() const;
};

// Expected SASS for a benchmark: the table record for ALU benchmarks, the
// pointer-chase load for memory levels, LDS.64/STS.64 for shared memory,
// sass_count x sass_opcode for WMMA, nothing for clock overhead. Throws
// ConfigError when the table has no record for the instruction.
SassMapping expected_mapping(const codegen::BenchInfo& bench, const LatencyTable& table);

// Opcodes accepted inside memory timed regions as loop control or the
// shared-memory follow-up add.
bool is_loop_control(std::string_view opcode) noexcept;

// Streaming verifier: feed every event of a trace, then finish().
class MappingVerifier {
 public:
  MappingVerifier(codegen::BenchInfo bench, SassMapping expected);

  void feed(const TraceEvent& event);
  // Throws StructuralError when the trace lacks a complete timed region.
  MappingReport finish();

 private:
  codegen::BenchInfo bench_;
  SassMapping expected_;
  int clocks_ = 0;
  std::size_t first_clock_line_ = 0;
  std::size_t extra_clock_line_ = 0;
  std::uint64_t barriers_ = 0;
  std::vector<std::string> barrier_opcodes_;
  std::vector<std::pair<std::string, std::uint64_t>> counts_;
  std::uint64_t region_events_ = 0;
};

MappingReport verify_mapping(std::string_view trace_text, const codegen::BenchInfo& bench, const LatencyTable& table,
                             const ParseOptions& options = {});
MappingReport verify_mapping(const TraceText& trace, const codegen::BenchInfo& bench, const LatencyTable& table,
                             const ParseOptions& options = {});
MappingReport verify_mapping_file(const std::filesystem::path& path, const codegen::BenchInfo& bench,
                                  const LatencyTable& table, const ParseOptions& options = {});

}  // namespace ptxlat::trace
