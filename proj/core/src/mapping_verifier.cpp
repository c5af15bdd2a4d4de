// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "ptxlat/error.hpp"
#include "ptxlat/trace.hpp"
#include "strings.hpp"

namespace ptxlat::trace {

namespace {

using Counts = std::map<std::string, std::uint64_t, std::less<>>;

// Largest number of compositions explored when several expansions may mix.
constexpr std::uint64_t kMaxMixtureSearch = 200'000;

Counts to_counts(const SassExpansion& e) {
  Counts out;
  for (const auto& term : e) out[term.opcode] += term.multiplicity;
  return out;
}

bool try_subtract(Counts& remaining, const Counts& e, std::uint64_t times) {
  if (times == 0) return true;
  for (const auto& [op, n] : e) {
    auto it = remaining.find(op);
    if (it == remaining.end() || it->second < n * times) return false;
  }
  for (const auto& [op, n] : e) remaining[op] -= n * times;
  return true;
}

void add_back(Counts& remaining, const Counts& e, std::uint64_t times) {
  if (times == 0) return;
  for (const auto& [op, n] : e) remaining[op] += n * times;
}

bool all_zero(const Counts& c) {
  return std::all_of(c.begin(), c.end(), [](const auto& kv) { return kv.second == 0; });
}

// Finds per-expansion instruction counts summing to `total` whose combined
// SASS equals `remaining`.
bool compose(Counts& remaining, const std::vector<Counts>& options, std::size_t i, std::uint64_t total,
             std::vector<std::uint64_t>& chosen, std::uint64_t& budget) {
  if (budget == 0) return false;
  --budget;
  if (i + 1 == options.size()) {
    if (!try_subtract(remaining, options[i], total)) return false;
    bool ok = all_zero(remaining);
    add_back(remaining, options[i], total);
    if (ok) chosen[i] = total;
    return ok;
  }
  for (std::uint64_t c = 0; c <= total; ++c) {
    if (!try_subtract(remaining, options[i], c)) break;
    chosen[i] = c;
    bool ok = compose(remaining, options, i + 1, total - c, chosen, budget);
    add_back(remaining, options[i], c);
    if (ok) return true;
  }
  return false;
}

std::string counts_text(const std::vector<std::pair<std::string, std::uint64_t>>& counts) {
  if (counts.empty()) return "nothing";
  std::vector<std::string> parts;
  for (const auto& [op, n] : counts) parts.push_back(fmt::format("{} x{}", op, n));
  return detail::join(parts, ", ");
}

}  // namespace

bool is_loop_control(std::string_view opcode) noexcept {
  static constexpr std::string_view kExact[] = {"BRA", "IADD3", "IADD3.X", "UIADD3", "UIADD3.X", "IADD", "MOV",
                                               "IMAD.MOV.U32"};
  if (std::find(std::begin(kExact), std::end(kExact), opcode) != std::end(kExact)) return true;
  return opcode.starts_with("ISETP");
}

SassMapping expected_mapping(const codegen::BenchInfo& bench, const LatencyTable& table) {
  using codegen::BenchKind;
  switch (bench.kind) {
    case BenchKind::clock_overhead: {
      SassMapping m;
      m.ptx_signature = "clock";
      return m;
    }
    case BenchKind::alu: {
      const auto* spec = bench.instruction();
      if (!spec) throw ConfigError(fmt::format("benchmark '{}' has no instruction target", bench.id));
      const auto* record = table.find(spec->key());
      if (!record) throw ConfigError(fmt::format("the latency table has no record for '{}'", spec->key()));
      return record->mapping;
    }
    case BenchKind::memory:
    case BenchKind::shared: {
      const auto* level = bench.memory_level();
      if (!level) throw ConfigError(fmt::format("benchmark '{}' has no memory level", bench.id));
      std::string_view sass;
      switch (*level) {
        case MemoryLevel::global: sass = "LDG.E.64.STRONG.SYS"; break;
        case MemoryLevel::l2: sass = "LDG.E.64.STRONG.GPU"; break;
        case MemoryLevel::l1: sass = "LDG.E.64"; break;
        case MemoryLevel::shared_load: sass = "LDS.64"; break;
        case MemoryLevel::shared_store: sass = "STS.64"; break;
      }
      return parse_sass_mapping(bench.timed_op, sass);
    }
    case BenchKind::wmma: {
      const auto* op = bench.tensor_op();
      if (!op) throw ConfigError(fmt::format("benchmark '{}' has no tensor op", bench.id));
      if (op->sass_opcode.empty()) return parse_sass_mapping(op->ptx_instruction, "multiple");
      return parse_sass_mapping(op->ptx_instruction, fmt::format("{}*{}", op->sass_count, op->sass_opcode));
    }
  }
  throw ConfigError("unknown benchmark kind");
}

MappingVerifier::MappingVerifier(codegen::BenchInfo bench, SassMapping expected)
    : bench_(std::move(bench)), expected_(std::move(expected)) {}

void MappingVerifier::feed(const TraceEvent& event) {
  if (event.kind == EventKind::clock_read) {
    ++clocks_;
    if (clocks_ == 1) first_clock_line_ = event.line;
    if (clocks_ == 3) extra_clock_line_ = event.line;
    return;
  }
  if (clocks_ != 1) return;
  ++region_events_;
  const bool barrier = event.kind == EventKind::barrier ||
                       (bench_.kind == codegen::BenchKind::wmma && event.opcode.starts_with("NOP"));
  if (barrier) {
    ++barriers_;
    if (std::find(barrier_opcodes_.begin(), barrier_opcodes_.end(), event.opcode) == barrier_opcodes_.end()) {
      barrier_opcodes_.push_back(event.opcode);
    }
    return;
  }
  for (auto& [op, n] : counts_) {
    if (op == event.opcode) {
      ++n;
      return;
    }
  }
  counts_.emplace_back(event.opcode, 1);
}

MappingReport MappingVerifier::finish() {
  if (clocks_ == 0) throw StructuralError("no timed region: the trace has no clock reads");
  if (clocks_ == 1) {
    throw StructuralError(fmt::format("unterminated timed region: only one clock read (line {})", first_clock_line_));
  }
  if (clocks_ > 2) {
    throw StructuralError(
        fmt::format("expected two clock reads, found {} (third at line {})", clocks_, extra_clock_line_));
  }

  MappingReport report;
  report.bench_id = bench_.id;
  report.expected = expected_;
  report.timed_count = bench_.timed_count;
  report.observed = counts_;
  const std::uint64_t t = bench_.timed_count;

  bool ok = true;
  if (barriers_ > 0) {
    ok = false;
    for (const auto& b : barrier_opcodes_) report.extras.push_back(fmt::format("{} (barrier in the timed region)", b));
    if (bench_.clock_width == codegen::ClockWidth::bits32) {
      report.notes.push_back("32-bit clock reads put a barrier inside the timed region");
    }
  }

  Counts remaining;
  for (const auto& [op, n] : counts_) remaining[op] += n;

  std::vector<SassExpansion> options;
  if (!expected_.multi_instruction) {
    options.push_back(expected_.expansion);
    for (const auto& alt : expected_.alternatives) options.push_back(alt);
  }
  auto known = [&](std::string_view op) {
    for (const auto& e : options) {
      for (const auto& term : e) {
        if (term.opcode == op) return true;
      }
    }
    for (const auto& h : expected_.hints) {
      if (h == op) return true;
    }
    return false;
  };

  if (bench_.kind == codegen::BenchKind::memory || bench_.kind == codegen::BenchKind::shared) {
    std::vector<std::string> tolerated;
    for (auto it = remaining.begin(); it != remaining.end();) {
      if (!known(it->first) && is_loop_control(it->first)) {
        tolerated.push_back(fmt::format("{} x{}", it->first, it->second));
        it = remaining.erase(it);
      } else {
        ++it;
      }
    }
    if (!tolerated.empty()) {
      report.notes.push_back(fmt::format("loop control accepted: {}", detail::join(tolerated, ", ")));
    }
  }

  // Any opcode may appear in an opaque sequence.
  if (!expected_.multi_instruction) {
    for (const auto& [op, n] : remaining) {
      if (!known(op)) report.extras.push_back(fmt::format("{} x{}", op, n));
    }
  }

  if (bench_.kind == codegen::BenchKind::clock_overhead || t == 0) {
    if (!remaining.empty()) ok = false;
  } else if (expected_.multi_instruction) {
    if (remaining.empty()) {
      ok = false;
      report.notes.push_back("expected a multi-instruction sequence but the timed region is empty");
    }
    for (const auto& h : expected_.hints) {
      auto it = remaining.find(h);
      std::uint64_t seen = it == remaining.end() ? 0 : it->second;
      if (seen < t) {
        ok = false;
        report.notes.push_back(fmt::format("hint {} seen {} time(s), expected at least {}", h, seen, t));
      }
    }
  } else if (!report.extras.empty()) {
    ok = false;
  } else {
    std::vector<Counts> counts;
    for (const auto& e : options) counts.push_back(to_counts(e));
    std::vector<std::uint64_t> chosen(options.size(), 0);
    std::uint64_t budget = kMaxMixtureSearch;
    if (!compose(remaining, counts, 0, t, chosen, budget)) {
      ok = false;
      report.notes.push_back(fmt::format("observed {} does not equal {} x ({})", counts_text(counts_), t,
                                         expected_.notation()));
      if (budget == 0) report.notes.push_back("mixture search limit reached");
    } else if (chosen.front() != t) {
      std::vector<std::string> mix;
      for (std::size_t i = 0; i < options.size(); ++i) {
        if (chosen[i]) mix.push_back(fmt::format("{} x{}", format_expansion(options[i]), chosen[i]));
      }
      report.notes.push_back(fmt::format("matched through alternatives: {}", detail::join(mix, ", ")));
    }
  }
  report.matched = ok;
  return report;
}

SassMapping MappingReport::observed_mapping() const {
  SassMapping m;
  m.ptx_signature = expected.ptx_signature;
  const bool divisible = timed_count > 0 && std::all_of(observed.begin(), observed.end(), [&](const auto& kv) {
                           return kv.second % timed_count == 0;
                         });
  for (const auto& [op, n] : observed) {
    m.expansion.push_back({op, static_cast<std::uint32_t>(divisible ? n / timed_count : n)});
  }
  if (m.expansion.empty()) m.multi_instruction = true;
  return m;
}

std::string MappingReport::summary() const {
  std::string out = fmt::format("{}: {}\n", matched ? "matched" : "mismatch", bench_id);
  out += fmt::format("  expected: {} x ({})\n", timed_count,
                     expected.expansion.empty() && !expected.multi_instruction ? "nothing" : expected.notation());
  out += fmt::format("  observed: {}\n", counts_text(observed));
  for (const auto& e : extras) out += fmt::format("  unexpected: {}\n", e);
  for (const auto& n : notes) out += fmt::format("  note: {}\n", n);
  for (const auto& n : parse_notes) out += fmt::format("  line {}: {}\n", n.line, n.message);
  return out;
}

MappingReport verify_mapping(std::string_view trace_text, const codegen::BenchInfo& bench, const LatencyTable& table,
                             const ParseOptions& options) {
  MappingVerifier verifier(bench, expected_mapping(bench, table));
  std::vector<ParseNote> notes;
  std::size_t line_no = 0;
  for (auto line : detail::split(trace_text, '\n')) {
    if (auto e = parse_line(line, ++line_no, options, &notes)) verifier.feed(*e);
  }
  auto report = verifier.finish();
  report.parse_notes = std::move(notes);
  return report;
}

MappingReport verify_mapping(const TraceText& trace, const codegen::BenchInfo& bench, const LatencyTable& table,
                             const ParseOptions& options) {
  MappingVerifier verifier(bench, expected_mapping(bench, table));
  std::vector<ParseNote> notes;
  for_each_event(trace, options, [&](const TraceEvent& e) { verifier.feed(e); }, &notes);
  auto report = verifier.finish();
  report.parse_notes = std::move(notes);
  return report;
}

MappingReport verify_mapping_file(const std::filesystem::path& path, const codegen::BenchInfo& bench,
                                  const LatencyTable& table, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read trace '{}'", path.string()));
  MappingVerifier verifier(bench, expected_mapping(bench, table));
  std::vector<ParseNote> notes;
  for_each_event(in, options, [&](const TraceEvent& e) { verifier.feed(e); }, &notes);
  auto report = verifier.finish();
  report.parse_notes = std::move(notes);
  return report;
}

}  // namespace ptxlat::trace
