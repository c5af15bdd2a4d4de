// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ptxlat/error.hpp"
#include "strings.hpp"

namespace ptxlat::trace {

namespace {

bool valid_opcode(std::string_view s) {
  if (s.empty() || !(s.front() >= 'A' && s.front() <= 'Z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_';
  });
}

bool valid_predicate(std::string_view s) {
  if (!s.starts_with('@')) return false;
  s.remove_prefix(1);
  if (s.starts_with('!')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

std::optional<TraceEvent> reject(std::size_t line_no, std::string_view token, std::string message,
                                 const ParseOptions& options, std::vector<ParseNote>* notes) {
  if (options.strict) throw ParseError(fmt::format("trace line {}: {}", line_no, message), std::string(token), line_no);
  if (notes) notes->push_back({line_no, fmt::format("skipped: {}", message)});
  return std::nullopt;
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::clock_read: return "clock_read";
    case EventKind::barrier: return "barrier";
    case EventKind::instruction: return "instruction";
  }
  return "?";
}

EventKind event_kind(std::string_view opcode, const std::vector<std::string>& operands) noexcept {
  if (opcode.starts_with("CS2R") || opcode.starts_with("S2R") || opcode.starts_with("S2UR")) {
    for (const auto& op : operands) {
      if (op.starts_with("SR_CLOCK")) return EventKind::clock_read;
    }
  }
  if (opcode.starts_with("BAR")) return EventKind::barrier;
  return EventKind::instruction;
}

std::optional<TraceEvent> parse_line(std::string_view line, std::size_t line_no, const ParseOptions& options,
                                     std::vector<ParseNote>* notes) {
  line = detail::trim(line);
  if (line.empty() || line.starts_with('#')) return std::nullopt;

  TraceEvent event;
  event.line = line_no;
  if (std::isdigit(static_cast<unsigned char>(line.front()))) {
    auto colon = line.find(':');
    auto index = colon == std::string_view::npos ? std::nullopt
                                                 : detail::parse_int<std::uint64_t>(detail::trim(line.substr(0, colon)));
    if (!index) return reject(line_no, line.substr(0, line.find_first_of(" \t:")), "malformed index prefix", options, notes);
    event.index = index;
    line = detail::trim(line.substr(colon + 1));
  }
  if (line.ends_with(';')) line = detail::trim(line.substr(0, line.size() - 1));
  if (line.empty()) return reject(line_no, "", "missing opcode", options, notes);

  auto next_token = [&line]() {
    auto end = line.find_first_of(" \t");
    auto token = line.substr(0, end);
    line = end == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(end));
    return token;
  };
  auto token = next_token();
  if (token.starts_with('@')) {
    if (!valid_predicate(token)) return reject(line_no, token, fmt::format("invalid predicate '{}'", token), options, notes);
    event.predicate = std::string(token);
    if (line.empty()) return reject(line_no, token, "predicate without an opcode", options, notes);
    token = next_token();
  }
  if (!valid_opcode(token)) return reject(line_no, token, fmt::format("invalid SASS opcode '{}'", token), options, notes);
  event.opcode = std::string(token);
  if (!line.empty()) {
    for (auto piece : detail::split(line, ',')) {
      piece = detail::trim(piece);
      if (piece.empty()) return reject(line_no, line, "empty operand", options, notes);
      event.operands.emplace_back(piece);
    }
  }
  event.kind = event_kind(event.opcode, event.operands);
  return event;
}

std::vector<TraceEvent> parse_trace(std::string_view text, const ParseOptions& options,
                                    std::vector<ParseNote>* notes) {
  std::vector<TraceEvent> out;
  std::size_t line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    if (auto e = parse_line(line, ++line_no, options, notes)) out.push_back(std::move(*e));
  }
  return out;
}

std::pair<std::size_t, std::size_t> timed_region(const std::vector<TraceEvent>& events) {
  std::vector<std::size_t> clocks;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].is_clock_read()) clocks.push_back(i);
  }
  if (clocks.empty()) throw StructuralError("no timed region: the trace has no clock reads");
  if (clocks.size() == 1) {
    throw StructuralError(fmt::format("unterminated timed region: only one clock read (line {})", events[clocks[0]].line));
  }
  if (clocks.size() > 2) {
    throw StructuralError(fmt::format("expected two clock reads, found {} (third at line {})", clocks.size(),
                                      events[clocks[2]].line));
  }
  return {clocks[0], clocks[1]};
}

std::vector<TraceEvent> extract_timed_region(const std::vector<TraceEvent>& events) {
  auto [open, close] = timed_region(events);
  return {events.begin() + static_cast<std::ptrdiff_t>(open) + 1, events.begin() + static_cast<std::ptrdiff_t>(close)};
}

std::string_view to_string(InstructionClass c) noexcept {
  switch (c) {
    case InstructionClass::integer: return "integer";
    case InstructionClass::float_: return "float";
    case InstructionClass::double_: return "double";
    case InstructionClass::half: return "half";
    case InstructionClass::memory: return "memory";
    case InstructionClass::tensor: return "tensor";
    case InstructionClass::control: return "control";
    case InstructionClass::clock: return "clock";
    case InstructionClass::barrier: return "barrier";
    case InstructionClass::other: return "other";
  }
  return "other";
}

InstructionClass classify(std::string_view opcode) noexcept {
  auto base = opcode.substr(0, opcode.find('.'));
  struct Family {
    std::string_view name;
    InstructionClass cls;
  };
  // Exact base opcodes first, then prefixes; order matters for prefixes.
  static constexpr Family kExact[] = {
      {"CS2R", InstructionClass::clock},    {"S2R", InstructionClass::clock},     {"S2UR", InstructionClass::clock},
      {"BAR", InstructionClass::barrier},   {"BRA", InstructionClass::control},   {"EXIT", InstructionClass::control},
      {"RET", InstructionClass::control},   {"CALL", InstructionClass::control},  {"JMP", InstructionClass::control},
      {"BSSY", InstructionClass::control},  {"BSYNC", InstructionClass::control}, {"WARPSYNC", InstructionClass::control},
      {"FLO", InstructionClass::integer},   {"MUFU", InstructionClass::float_},   {"F2I", InstructionClass::float_},
      {"I2F", InstructionClass::float_},    {"MOV", InstructionClass::integer},   {"SEL", InstructionClass::integer},
      {"LOP3", InstructionClass::integer},  {"SHF", InstructionClass::integer},   {"SGXT", InstructionClass::integer},
      {"PRMT", InstructionClass::integer},  {"POPC", InstructionClass::integer},  {"BREV", InstructionClass::integer},
      {"BMSK", InstructionClass::integer},  {"VABSDIFF", InstructionClass::integer}, {"NOP", InstructionClass::other},
  };
  static constexpr Family kPrefix[] = {
      {"HMMA", InstructionClass::tensor}, {"IMMA", InstructionClass::tensor}, {"DMMA", InstructionClass::tensor},
      {"LD", InstructionClass::memory},   {"ST", InstructionClass::memory},   {"ATOM", InstructionClass::memory},
      {"RED", InstructionClass::memory},  {"D", InstructionClass::double_},   {"H", InstructionClass::half},
      {"F", InstructionClass::float_},    {"I", InstructionClass::integer},
  };
  for (const auto& f : kExact) {
    if (base == f.name) return f.cls;
  }
  for (const auto& f : kPrefix) {
    if (base.starts_with(f.name)) return f.cls;
  }
  // Uniform-datapath variants (UIADD3, ULOP3, UMOV, ...) are integer ops.
  if (base.size() > 1 && base.front() == 'U' && classify(base.substr(1)) == InstructionClass::integer) {
    return InstructionClass::integer;
  }
  return InstructionClass::other;
}

InstructionClass classify(const TraceEvent& event, bool wmma_region) noexcept {
  if (event.is_clock_read()) return InstructionClass::clock;
  if (event.is_barrier()) return InstructionClass::barrier;
  if (wmma_region && event.opcode.starts_with("NOP")) return InstructionClass::barrier;
  auto c = classify(event.opcode);
  // A bare S2R/CS2R that does not read the clock is a special-register move.
  return c == InstructionClass::clock ? InstructionClass::integer : c;
}

// ---------------------------------------------------------------------------

void TraceText::add_line(std::string line) {
  if (!blocks_.empty() && blocks_.back().repeat == 1) {
    blocks_.back().lines.push_back(std::move(line));
    return;
  }
  blocks_.push_back({{std::move(line)}, 1});
}

void TraceText::add_repeated(std::vector<std::string> lines, std::uint64_t repeat) {
  if (lines.empty() || repeat == 0) return;
  if (repeat == 1) {
    for (auto& l : lines) add_line(std::move(l));
    return;
  }
  blocks_.push_back({std::move(lines), repeat});
}

std::uint64_t TraceText::line_count() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : blocks_) n += b.lines.size() * b.repeat;
  return n;
}

void TraceText::write(std::ostream& out) const {
  std::uint64_t index = 0;
  std::string buffer;
  for (const auto& b : blocks_) {
    for (std::uint64_t r = 0; r < b.repeat; ++r) {
      for (const auto& line : b.lines) {
        buffer += fmt::format("{:6}: {}\n", index++, line);
        if (buffer.size() > (1u << 16)) {
          out << buffer;
          buffer.clear();
        }
      }
    }
  }
  out << buffer;
}

void TraceText::write_file(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write trace '{}'", path.string()));
  write(out);
}

std::string TraceText::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void for_each_event(const TraceText& trace, const ParseOptions& options,
                    const std::function<void(const TraceEvent&)>& fn, std::vector<ParseNote>* notes) {
  std::uint64_t line_base = 0;
  for (const auto& block : trace.blocks()) {
    // Parse a block once and replay it, adjusting positions.
    std::vector<std::pair<std::size_t, TraceEvent>> parsed;
    for (std::size_t i = 0; i < block.lines.size(); ++i) {
      if (auto e = parse_line(block.lines[i], line_base + i + 1, options, notes)) parsed.emplace_back(i, std::move(*e));
    }
    for (std::uint64_t r = 0; r < block.repeat; ++r) {
      const std::uint64_t offset = line_base + r * block.lines.size();
      for (auto& [i, e] : parsed) {
        e.line = offset + i + 1;
        e.index = offset + i;
        fn(e);
      }
    }
    line_base += block.lines.size() * block.repeat;
  }
}

void for_each_event(std::istream& in, const ParseOptions& options, const std::function<void(const TraceEvent&)>& fn,
                    std::vector<ParseNote>* notes) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (auto e = parse_line(line, ++line_no, options, notes)) fn(*e);
  }
}

}  // namespace ptxlat::trace
