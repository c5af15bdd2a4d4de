// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include <fmt/format.h>

#include "ptxlat/report.hpp"

namespace ptxlat::report {

namespace {

constexpr std::string_view kDepSuffix = ":dep";

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string family_of(std::string_view signature) { return std::string(signature.substr(0, signature.find('.'))); }

std::string record_cycles(const LatencyRecord& r) { return format_range(r.cycles_min, r.cycles_max, r.approximate); }

// "measured / theoretical", with "-" for a missing side.
std::string throughput_text(const TensorCoreOp& op) {
  if (!op.measured_throughput && !op.theoretical_throughput) return "-";
  auto side = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("-"); };
  return fmt::format("{} / {}", side(op.measured_throughput), side(op.theoretical_throughput));
}

std::string sass_text(const TensorCoreOp& op) {
  if (op.sass_opcode.empty()) return "multiple";
  return op.sass_count == 1 ? op.sass_opcode : fmt::format("{}*{}", op.sass_count, op.sass_opcode);
}

void md_table_header(std::string& out, std::initializer_list<std::string_view> columns) {
  out += "|";
  for (auto c : columns) out += fmt::format(" {} |", c);
  out += "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
}

std::string render_markdown(const LatencyTable& table) {
  std::string out = table.architecture().empty() ? "# Latency table\n"
                                                 : fmt::format("# Latency table: {}\n", table.architecture());

  // Dependent records whose independent twin exists are shown as pairs.
  std::set<std::string> paired;
  for (const auto& r : table.records()) {
    if (r.signature.ends_with(kDepSuffix) &&
        table.find(std::string_view(r.signature).substr(0, r.signature.size() - kDepSuffix.size()))) {
      paired.insert(r.signature);
    }
  }

  out += "\n## Instructions\n";
  std::vector<std::string> families;
  for (const auto& r : table.records()) {
    if (paired.contains(r.signature)) continue;
    auto f = family_of(r.signature);
    if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
  }
  if (families.empty()) {
    out += "\n";
    md_table_header(out, {"PTX", "SASS", "Cycles", "Source"});
  }
  for (const auto& f : families) {
    out += fmt::format("\n### {}\n\n", f);
    md_table_header(out, {"PTX", "SASS", "Cycles", "Source"});
    for (const auto& r : table.records()) {
      if (paired.contains(r.signature) || family_of(r.signature) != f) continue;
      auto sass = md_cell(r.mapping.notation());
      if (r.mapping_mismatch) sass += " (observed)";
      out += fmt::format("| {} | {} | {} | {} |\n", md_cell(r.signature), sass, record_cycles(r), to_string(r.source));
    }
  }

  out += "\n## Dependent and independent sequences\n\n";
  md_table_header(out, {"Instruction", "Dependent", "Independent"});
  for (const auto& r : table.records()) {
    if (!paired.contains(r.signature)) continue;
    const auto base = std::string_view(r.signature).substr(0, r.signature.size() - kDepSuffix.size());
    out += fmt::format("| {} | {} | {} |\n", md_cell(base), record_cycles(r), record_cycles(*table.find(base)));
  }

  out += "\n## Memory\n\n";
  md_table_header(out, {"Memory", "Cycles"});
  for (const auto& [level, m] : table.memory()) {
    out += fmt::format("| {} | {} |\n", level_title(level), format_range(m.cycles, m.cycles, m.approximate));
  }

  out += "\n## Tensor cores\n\n";
  md_table_header(out, {"Shape", "Inputs", "Accumulator", "SASS", "Cycles per SASS", "Cycles", "Throughput GB/s (measured / theoretical)"});
  for (const auto& op : table.tensor_ops()) {
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", op.shape.to_string(), to_string(op.in_type),
                       to_string(op.acc_type), md_cell(sass_text(op)), op.per_sass_cycles, op.total_cycles(),
                       throughput_text(op));
  }

  out += "\n## Clock overhead\n\n";
  md_table_header(out, {"Cycles"});
  if (auto c = table.clock_overhead()) out += fmt::format("| {} |\n", *c);
  return out;
}

std::string render_csv(const LatencyTable& table) {
  std::string out = "section,key,mapping,cycles_min,cycles_max,approximate,source,mapping_mismatch,note\n";
  auto row = [&out](std::string_view section, std::string_view key, std::string_view mapping, const Cycles& min,
                    const Cycles& max, bool approximate, std::string_view source, bool mismatch,
                    std::string_view note) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", section, csv_cell(key), csv_cell(mapping), format_cycles(min),
                       format_cycles(max), approximate, source, mismatch, csv_cell(note));
  };
  for (const auto& r : table.records()) {
    row("instruction", r.signature, r.mapping.notation(), r.cycles_min, r.cycles_max, r.approximate,
        to_string(r.source), r.mapping_mismatch, r.note);
  }
  for (const auto& [level, m] : table.memory()) {
    row("memory", to_string(level), "", m.cycles, m.cycles, m.approximate, "", false, "");
  }
  for (const auto& op : table.tensor_ops()) {
    row("tensor", op.signature(), sass_text(op), op.total_cycles(), op.total_cycles(), false, "", false,
        fmt::format("{} cycles per SASS; throughput {} GB/s (measured / theoretical)", op.per_sass_cycles, throughput_text(op)));
  }
  if (auto c = table.clock_overhead()) row("clock", "clock_overhead", "", *c, *c, false, "", false, "");
  return out;
}

}  // namespace

std::optional<Format> parse_format(std::string_view text) noexcept {
  if (text == "md" || text == "markdown") return Format::markdown;
  if (text == "csv") return Format::csv;
  return std::nullopt;
}

std::string format_range(const Cycles& min, const Cycles& max, bool approximate) {
  std::string out = min == max ? format_cycles(min) : fmt::format("{}-{}", format_cycles(min), format_cycles(max));
  return approximate ? "~" + out : out;
}

std::string_view level_title(MemoryLevel level) noexcept {
  switch (level) {
    case MemoryLevel::global: return "Global memory";
    case MemoryLevel::l2: return "L2 cache";
    case MemoryLevel::l1: return "L1 cache";
    case MemoryLevel::shared_load: return "Shared memory (ld)";
    case MemoryLevel::shared_store: return "Shared memory (st)";
  }
  return "?";
}

std::string render(const LatencyTable& table, Format format) {
  return format == Format::markdown ? render_markdown(table) : render_csv(table);
}

}  // namespace ptxlat::report
