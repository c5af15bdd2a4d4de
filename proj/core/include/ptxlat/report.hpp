// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Table files, markdown/CSV reports and table diffs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptxlat/isa_model.hpp"

namespace ptxlat::report {

inline constexpr int kTableSchemaVersion = 1;

// A table as persisted. Fields this version does not know about are kept in
// `extra` (top level) and `entry_extra` (per record, keyed "records/<sig>",
// "memory/<level>", "tensor_ops/<sig>") and written back unchanged.
struct TableDocument {
  int schema_version = kTableSchemaVersion;
  std::string generated_at;
  LatencyTable table;
  nlohmann::json extra = nlohmann::json::object();
  std::map<std::string, nlohmann::json> entry_extra;

  bool operator==(const TableDocument&) const = default;
};

// generated_at comes from SOURCE_DATE_EPOCH (as UTC ISO 8601) when set and
// is empty otherwise, so that saved files are reproducible.
TableDocument make_document(LatencyTable table);

// JSON with sorted keys and two-space indentation. Cycles are integers when
// integral and "p/q" strings otherwise.
std::string document_to_text(const TableDocument& doc);
// Throws ParseError (with line and column) on malformed JSON or fields,
// MigrationError on another schema_version, ValidationError when a record
// breaks an invariant.
TableDocument document_from_text(std::string_view text);

void save_document(const TableDocument& doc, const std::filesystem::path& path);
TableDocument load_document(const std::filesystem::path& path);
void save(const LatencyTable& table, const std::filesystem::path& path);
LatencyTable load(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

enum class Format : std::uint8_t { markdown, csv };

std::optional<Format> parse_format(std::string_view text) noexcept;

// "2", "2-18", "~200", "7/3".
std::string format_range(const Cycles& min, const Cycles& max, bool approximate = false);

// Display name of a memory level: "Global memory", "L2 cache", ...
std::string_view level_title(MemoryLevel level) noexcept;

// Markdown: instruction records grouped by opcode family, dependent /
// independent pairs, memory levels, tensor ops and the clock overhead.
// CSV: one row per record with columns
//   section,key,mapping,cycles_min,cycles_max,approximate,source,mapping_mismatch,note
// Output is a pure function of the table.
std::string render(const LatencyTable& table, Format format);

// ---------------------------------------------------------------------------
// Diff
// ---------------------------------------------------------------------------

enum class ChangeKind : std::uint8_t { changed, added, removed };

std::string_view to_string(ChangeKind kind) noexcept;

struct DiffEntry {
  std::string section;  // "instruction", "memory", "tensor", "clock"
  std::string key;
  ChangeKind kind = ChangeKind::changed;
  // Cycles on each side (min, max); unset on the side that lacks the key.
  std::optional<std::pair<Cycles, Cycles>> a;
  std::optional<std::pair<Cycles, Cycles>> b;
  // a - b on both bounds, and relative to b's lower bound in percent
  // (unset when b is 0 or either side is missing).
  Cycles delta_min{0};
  Cycles delta_max{0};
  std::optional<double> percent;
  // Non-cycle differences: SASS mapping, throughput, SASS split.
  std::vector<std::string> details;

  bool operator==(const DiffEntry&) const = default;
};

struct DiffReport {
  std::vector<DiffEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  // True when no key present in both tables differs.
  bool shared_keys_equal() const noexcept;
  std::string summary() const;
};

// Compares cycles and SASS mappings of instruction records, memory
// latencies, tensor ops (cycles, SASS split, throughput) and the clock
// overhead. Sources, notes and approximate flags are not compared.
DiffReport diff(const LatencyTable& a, const LatencyTable& b);

}  // namespace ptxlat::report
