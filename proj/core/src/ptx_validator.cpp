// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Validator for the PTX subset the generator emits. It is not a PTX
// assembler: it checks structure, declarations and the clock window, then
// runs a tiny interpreter over integer moves, adds, compares and branches to
// count how often the timed instruction executes.

#include <array>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "bench_header.hpp"
#include "ptxlat/codegen.hpp"
#include "strings.hpp"
#include "validator_internal.hpp"

namespace ptxlat::codegen {

namespace {

using ptxlat::detail::split;
using ptxlat::detail::split_ws;
using ptxlat::detail::trim;

constexpr std::uint64_t kStepLimit = 400'000'000;

const std::set<std::string_view> kKnownOpcodes = {
    "abs",  "add",   "addc",  "and",   "bar",   "bfe",   "bfi",  "bfind", "bra",   "brev",
    "clz",  "cnot",  "copysign", "cos", "cvt",  "cvta",  "div",  "dp2a",  "dp4a",  "ex2",
    "exit", "fma",   "fns",   "ld",    "lg2",   "lop3",  "mad",  "mad24", "max",   "membar",
    "min",  "mov",   "mul",   "mul24", "neg",   "not",   "or",   "popc",  "prmt",  "rcp",
    "rem",  "ret",   "rsqrt", "sad",   "selp",  "setp",  "shl",  "shr",   "sin",   "sqrt",
    "st",   "sub",   "subc",  "tanh",  "testp", "xor",
};

const std::set<std::string_view> kSpecialRegisters = {
    "%clock", "%clock64", "%tid.x", "%tid.y", "%tid.z", "%ntid.x", "%ctaid.x", "%laneid",
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || s.front() == '_' || s.front() == '$')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  });
}

std::optional<std::int64_t> parse_immediate(std::string_view s) {
  bool neg = false;
  if (s.starts_with('-')) {
    neg = true;
    s.remove_prefix(1);
  }
  std::optional<std::uint64_t> v;
  if (s.starts_with("0x") || s.starts_with("0X")) {
    v = ptxlat::detail::parse_int<std::uint64_t>(s.substr(2), 16);
  } else {
    v = ptxlat::detail::parse_int<std::uint64_t>(s);
  }
  if (!v) return std::nullopt;
  auto value = static_cast<std::int64_t>(*v);
  return neg ? -value : value;
}

bool is_float_immediate(std::string_view s) {
  if (!(s.starts_with("0f") || s.starts_with("0F") || s.starts_with("0d") || s.starts_with("0D"))) return false;
  auto digits = s.substr(2);
  std::size_t want = (s[1] == 'f' || s[1] == 'F') ? 8 : 16;
  return digits.size() == want &&
         std::all_of(digits.begin(), digits.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

enum class OperandKind : std::uint8_t { reg, special, imm, mem, symbol };

struct Operand {
  OperandKind kind = OperandKind::imm;
  int reg = -1;  // register index for reg, base register for mem
  std::optional<std::int64_t> imm;
  std::string text;
};

enum class Exec : std::uint8_t { mov, add, sub, shl, mul, band, bor, bxor, setp, bra, ret, other };

struct Insn {
  std::size_t line = 0;
  std::string opcode;
  std::string base;
  int guard = -1;
  bool guard_negated = false;
  std::vector<Operand> ops;
  int dest = -1;
  std::vector<int> reads;
  bool clock_read = false;
  Exec exec = Exec::other;
  // setp
  std::string compare;
  bool compare_signed = false;
  // bra
  std::string target;
  std::size_t target_index = 0;
};

struct RegDecl {
  std::string prefix;
  bool ranged = false;
  std::uint64_t count = 0;
};

class PtxValidator {
 public:
  explicit PtxValidator(std::string_view text) : text_(text) {}

  ValidationReport run() {
    if (auto header = ptxlat::detail::find_bench_header(text_)) {
      if (auto op = header->get("timed-op")) report_.timed_op = std::string(*op);
      if (auto n = header->get("timed-count")) {
        if (auto v = ptxlat::detail::parse_int<std::uint64_t>(*n)) {
          report_.declared_timed_count = *v;
        } else {
          detail::add_issue(report_, header->line, std::string(*n), "timed-count in the header is not a number");
        }
      }
    }
    parse_lines();
    if (!report_.valid) return std::move(report_);
    check_structure();
    if (!report_.valid) return std::move(report_);
    interpret();
    return std::move(report_);
  }

 private:
  void error(std::size_t line, std::string_view token, std::string message) {
    detail::add_issue(report_, line, std::string(token), std::move(message));
  }

  // -------------------------------------------------------------------------
  // Parsing
  // -------------------------------------------------------------------------

  enum class State { top, params, before_body, body, done };

  void parse_lines() {
    std::size_t line_no = 0;
    for (auto raw : split(text_, '\n')) {
      ++line_no;
      auto line = raw;
      if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
      line = trim(line);
      if (line.empty()) continue;
      parse_line(line, line_no);
    }
    if (!seen_version_) error(1, ".version", "missing .version directive");
    if (!seen_target_) error(1, ".target", "missing .target directive");
    if (!seen_address_size_) error(1, ".address_size", "missing .address_size directive");
    if (state_ == State::top) error(line_no, "", "no .entry kernel found");
    else if (state_ != State::done) error(line_no, "}", "kernel body is not closed");
    for (auto& insn : insns_) {
      if (insn.exec != Exec::bra) continue;
      auto it = labels_.find(insn.target);
      if (it == labels_.end()) {
        error(insn.line, insn.target, fmt::format("branch to undefined label '{}'", insn.target));
      } else {
        insn.target_index = it->second;
      }
    }
  }

  void parse_line(std::string_view line, std::size_t n) {
    switch (state_) {
      case State::top: return parse_top(line, n);
      case State::params: return parse_param(line, n);
      case State::before_body:
        if (line == "{") {
          state_ = State::body;
          return;
        }
        return error(n, line, "expected '{' to open the kernel body");
      case State::body: return parse_body(line, n);
      case State::done: return error(n, line, "unexpected text after the kernel body");
    }
  }

  void parse_top(std::string_view line, std::size_t n) {
    auto tokens = split_ws(line);
    const auto first = tokens.front();
    if (first == ".version") {
      seen_version_ = true;
      if (tokens.size() != 2 || tokens[1].find('.') == std::string_view::npos) {
        error(n, tokens.size() > 1 ? tokens[1] : first, ".version expects <major>.<minor>");
      }
      return;
    }
    if (first == ".target") {
      seen_target_ = true;
      if (tokens.size() != 2 || !tokens[1].starts_with("sm_")) {
        error(n, tokens.size() > 1 ? tokens[1] : first, ".target expects sm_<arch>");
      }
      return;
    }
    if (first == ".address_size") {
      seen_address_size_ = true;
      if (tokens.size() != 2 || (tokens[1] != "64" && tokens[1] != "32")) {
        error(n, tokens.size() > 1 ? tokens[1] : first, ".address_size expects 32 or 64");
      }
      return;
    }
    std::size_t i = 0;
    if (tokens[i] == ".visible") ++i;
    if (i < tokens.size() && tokens[i] == ".entry") {
      if (i + 1 >= tokens.size()) return error(n, line, ".entry needs a kernel name");
      std::string_view rest = line.substr(line.find(".entry") + 6);
      rest = trim(rest);
      auto paren = rest.find('(');
      auto name = trim(rest.substr(0, paren));
      if (!is_identifier(name)) return error(n, name, fmt::format("invalid kernel name '{}'", name));
      if (paren == std::string_view::npos) return error(n, name, "expected '(' after the kernel name");
      auto after = trim(rest.substr(paren + 1));
      if (after.empty()) {
        state_ = State::params;
      } else if (after == ")") {
        state_ = State::before_body;
      } else if (after == "){" || after == ") {") {
        state_ = State::body;
      } else {
        error(n, after, "parameters must be declared one per line");
      }
      return;
    }
    error(n, first, fmt::format("unknown directive '{}'", first));
  }

  void parse_param(std::string_view line, std::size_t n) {
    if (line == ")") {
      state_ = State::before_body;
      return;
    }
    if (line == "){" || line == ") {") {
      state_ = State::body;
      return;
    }
    auto tokens = split_ws(line);
    if (tokens.size() != 3 || tokens[0] != ".param" || !tokens[1].starts_with('.')) {
      return error(n, line, "expected '.param .<type> <name>'");
    }
    auto name = tokens[2];
    if (name.ends_with(',')) name.remove_suffix(1);
    if (!is_identifier(name)) return error(n, name, fmt::format("invalid parameter name '{}'", name));
    symbols_.insert(std::string(name));
  }

  void parse_body(std::string_view line, std::size_t n) {
    if (line == "}") {
      state_ = State::done;
      return;
    }
    if (line.starts_with(".reg")) return parse_reg(line, n);
    if (line.starts_with(".shared")) return parse_shared(line, n);
    if (line.starts_with('.')) return error(n, split_ws(line).front(), "unknown directive inside the kernel body");
    if (line.ends_with(':')) {
      auto name = line.substr(0, line.size() - 1);
      if (!is_identifier(name)) return error(n, name, fmt::format("invalid label '{}'", name));
      if (!labels_.emplace(std::string(name), insns_.size()).second) {
        return error(n, name, fmt::format("label '{}' defined twice", name));
      }
      return;
    }
    parse_instruction(line, n);
  }

  void parse_reg(std::string_view line, std::size_t n) {
    if (!line.ends_with(';')) return error(n, line, "missing ';'");
    auto tokens = split_ws(line.substr(0, line.size() - 1));
    if (tokens.size() != 3 || !tokens[1].starts_with('.')) return error(n, line, "expected '.reg .<type> %name<N>'");
    auto decl = tokens[2];
    if (!decl.starts_with('%')) return error(n, decl, "register names start with '%'");
    RegDecl reg;
    if (auto lt = decl.find('<'); lt != std::string_view::npos) {
      if (!decl.ends_with('>')) return error(n, decl, "unterminated register range");
      auto count = ptxlat::detail::parse_int<std::uint64_t>(decl.substr(lt + 1, decl.size() - lt - 2));
      if (!count) return error(n, decl, "register range needs a count");
      reg.prefix = std::string(decl.substr(0, lt));
      reg.ranged = true;
      reg.count = *count;
    } else {
      reg.prefix = std::string(decl);
    }
    reg_decls_.push_back(std::move(reg));
  }

  void parse_shared(std::string_view line, std::size_t n) {
    if (!line.ends_with(';')) return error(n, line, "missing ';'");
    auto tokens = split_ws(line.substr(0, line.size() - 1));
    auto name = tokens.back();
    if (auto br = name.find('['); br != std::string_view::npos) {
      if (!name.ends_with(']')) return error(n, name, "unterminated array size");
      name = name.substr(0, br);
    }
    if (tokens.size() < 3 || !is_identifier(name)) return error(n, line, "expected '.shared [.align N] .<type> name'");
    symbols_.insert(std::string(name));
  }

  bool register_declared(std::string_view name) const {
    for (const auto& decl : reg_decls_) {
      if (!decl.ranged) {
        if (decl.prefix == name) return true;
        continue;
      }
      if (!name.starts_with(decl.prefix)) continue;
      auto idx = ptxlat::detail::parse_int<std::uint64_t>(name.substr(decl.prefix.size()));
      if (idx && *idx < decl.count) return true;
    }
    return false;
  }

  int reg_index(std::string_view name) {
    auto [it, inserted] = reg_ids_.try_emplace(std::string(name), static_cast<int>(reg_ids_.size()));
    return it->second;
  }

  std::optional<Operand> parse_operand(std::string_view text, std::size_t n, bool allow_label) {
    Operand op;
    op.text = std::string(text);
    if (text.starts_with('%')) {
      if (kSpecialRegisters.contains(text)) {
        op.kind = OperandKind::special;
        return op;
      }
      if (!register_declared(text)) {
        error(n, text, fmt::format("register '{}' is not declared", text));
        return std::nullopt;
      }
      op.kind = OperandKind::reg;
      op.reg = reg_index(text);
      return op;
    }
    if (text.starts_with('[')) {
      if (!text.ends_with(']')) {
        error(n, text, "unterminated memory operand");
        return std::nullopt;
      }
      auto inner = trim(text.substr(1, text.size() - 2));
      auto split_at = inner.find_first_of("+-", 1);
      auto base = trim(inner.substr(0, split_at));
      if (split_at != std::string_view::npos) {
        auto disp = trim(inner.substr(split_at + (inner[split_at] == '+' ? 1 : 0)));
        if (!parse_immediate(disp)) {
          error(n, disp, fmt::format("invalid address offset '{}'", disp));
          return std::nullopt;
        }
      }
      op.kind = OperandKind::mem;
      if (base.starts_with('%')) {
        if (!register_declared(base)) {
          error(n, base, fmt::format("register '{}' is not declared", base));
          return std::nullopt;
        }
        op.reg = reg_index(base);
      } else if (!symbols_.contains(base)) {
        error(n, base, fmt::format("unknown symbol '{}' in memory operand", base));
        return std::nullopt;
      }
      return op;
    }
    if (auto imm = parse_immediate(text)) {
      op.kind = OperandKind::imm;
      op.imm = imm;
      return op;
    }
    if (is_float_immediate(text)) {
      op.kind = OperandKind::imm;
      return op;
    }
    if (is_identifier(text) && (allow_label || symbols_.contains(text))) {
      op.kind = OperandKind::symbol;
      return op;
    }
    error(n, text, fmt::format("invalid operand '{}'", text));
    return std::nullopt;
  }

  void parse_instruction(std::string_view line, std::size_t n) {
    if (!line.ends_with(';')) {
      auto tokens = split_ws(line);
      return error(n, tokens.back(), "missing ';' at end of instruction");
    }
    line = trim(line.substr(0, line.size() - 1));
    Insn insn;
    insn.line = n;
    if (line.starts_with('@')) {
      auto sp = line.find_first_of(" \t");
      if (sp == std::string_view::npos) return error(n, line, "predicate guard without an instruction");
      auto guard = line.substr(1, sp - 1);
      if (guard.starts_with('!')) {
        insn.guard_negated = true;
        guard.remove_prefix(1);
      }
      if (!register_declared(guard)) return error(n, guard, fmt::format("predicate '{}' is not declared", guard));
      insn.guard = reg_index(guard);
      line = trim(line.substr(sp));
    }
    auto sp = line.find_first_of(" \t");
    auto opcode = line.substr(0, sp);
    auto rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    auto parts = split(opcode, '.');
    for (auto p : parts) {
      if (p.empty() || !std::all_of(p.begin(), p.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
          })) {
        return error(n, opcode, fmt::format("malformed opcode '{}'", opcode));
      }
    }
    if (!kKnownOpcodes.contains(parts.front())) {
      return error(n, parts.front(), fmt::format("unknown opcode '{}'", parts.front()));
    }
    insn.opcode = std::string(opcode);
    insn.base = std::string(parts.front());
    const bool is_branch = insn.base == "bra";
    if (!rest.empty()) {
      for (auto piece : split(rest, ',')) {
        piece = trim(piece);
        if (piece.empty()) return error(n, rest, "empty operand");
        auto op = parse_operand(piece, n, is_branch);
        if (!op) return;
        insn.ops.push_back(std::move(*op));
      }
    }

    static const std::map<std::string_view, Exec> kExec = {
        {"mov", Exec::mov}, {"add", Exec::add}, {"sub", Exec::sub}, {"shl", Exec::shl}, {"mul", Exec::mul},
        {"and", Exec::band}, {"or", Exec::bor}, {"xor", Exec::bxor}, {"setp", Exec::setp}, {"bra", Exec::bra},
        {"ret", Exec::ret}, {"exit", Exec::ret},
    };
    if (auto it = kExec.find(insn.base); it != kExec.end()) insn.exec = it->second;
    if (insn.exec == Exec::mul && !(parts.size() == 3 && parts[1] == "lo")) insn.exec = Exec::other;
    if (insn.exec == Exec::setp) {
      if (parts.size() != 3) return error(n, opcode, "setp expects setp.<cmp>.<type>");
      insn.compare = std::string(parts[1]);
      insn.compare_signed = parts[2].starts_with('s');
    }
    if (is_branch) {
      if (insn.ops.size() != 1 || insn.ops[0].kind != OperandKind::symbol) {
        return error(n, rest, "bra expects a single label operand");
      }
      insn.target = insn.ops[0].text;
    }

    const bool writes = !(insn.base == "st" || is_branch || insn.exec == Exec::ret || insn.base == "bar" ||
                          insn.base == "membar");
    for (std::size_t i = 0; i < insn.ops.size(); ++i) {
      const auto& op = insn.ops[i];
      if (i == 0 && writes) {
        if (op.kind != OperandKind::reg) return error(n, op.text, "destination must be a register");
        insn.dest = op.reg;
        continue;
      }
      if (op.reg >= 0) insn.reads.push_back(op.reg);
    }
    if (insn.guard >= 0) insn.reads.push_back(insn.guard);
    if (writes && insn.ops.size() == 2 && insn.ops[1].kind == OperandKind::special &&
        (insn.ops[1].text == "%clock" || insn.ops[1].text == "%clock64")) {
      insn.clock_read = true;
    }
    insns_.push_back(std::move(insn));
  }

  // -------------------------------------------------------------------------
  // Structure
  // -------------------------------------------------------------------------

  void check_structure() {
    std::vector<std::size_t> clocks;
    for (std::size_t i = 0; i < insns_.size(); ++i) {
      if (insns_[i].clock_read) clocks.push_back(i);
    }
    report_.instruction_count = insns_.size();
    if (clocks.empty()) return error(insns_.empty() ? 1 : insns_.front().line, "%clock", "no timed region: the kernel never reads the clock");
    if (clocks.size() == 1) {
      return error(insns_[clocks[0]].line, insns_[clocks[0]].opcode, "unterminated timed region: only one clock read");
    }
    if (clocks.size() > 2) {
      return error(insns_[clocks[2]].line, insns_[clocks[2]].opcode,
                   fmt::format("expected exactly two clock reads, found {}", clocks.size()));
    }
    first_clock_ = clocks[0];
    second_clock_ = clocks[1];
    report_.inside_window = second_clock_ - first_clock_ - 1;
    report_.outside_window = insns_.size() - report_.inside_window - 2;

    // The delta must reach memory.
    const int start = insns_[first_clock_].dest;
    const int end = insns_[second_clock_].dest;
    bool stored = false;
    for (std::size_t i = second_clock_ + 1; i < insns_.size() && !stored; ++i) {
      const auto& in = insns_[i];
      if (in.base != "sub") continue;
      if (std::find(in.reads.begin(), in.reads.end(), start) == in.reads.end()) continue;
      if (std::find(in.reads.begin(), in.reads.end(), end) == in.reads.end()) continue;
      for (std::size_t j = i + 1; j < insns_.size(); ++j) {
        const auto& st = insns_[j];
        if (st.base == "st" && std::find(st.reads.begin(), st.reads.end(), in.dest) != st.reads.end()) {
          stored = true;
          break;
        }
      }
    }
    if (!stored) error(insns_[second_clock_].line, insns_[second_clock_].opcode, "clock delta is never stored");

    // Every value produced inside the window must be consumed later, or the
    // compiler is free to drop it.
    for (std::size_t i = first_clock_ + 1; i < second_clock_; ++i) {
      const auto& in = insns_[i];
      if (in.dest < 0) continue;
      bool used = false;
      for (std::size_t j = i + 1; j < insns_.size() && !used; ++j) {
        used = std::find(insns_[j].reads.begin(), insns_[j].reads.end(), in.dest) != insns_[j].reads.end();
      }
      if (!used) {
        error(in.line, in.ops.front().text,
              fmt::format("timed result {} of '{}' is never used", in.ops.front().text, in.opcode));
      }
    }
  }

  // -------------------------------------------------------------------------
  // Interpretation
  // -------------------------------------------------------------------------

  static bool compare(const Insn& in, std::int64_t a, std::int64_t b) {
    const auto ua = static_cast<std::uint64_t>(a);
    const auto ub = static_cast<std::uint64_t>(b);
    const std::string& c = in.compare;
    if (c == "eq") return a == b;
    if (c == "ne") return a != b;
    if (in.compare_signed) {
      if (c == "lt") return a < b;
      if (c == "le") return a <= b;
      if (c == "gt") return a > b;
      return a >= b;
    }
    if (c == "lt" || c == "lo") return ua < ub;
    if (c == "le" || c == "ls") return ua <= ub;
    if (c == "gt" || c == "hi") return ua > ub;
    return ua >= ub;
  }

  void interpret() {
    std::vector<std::optional<std::int64_t>> values(reg_ids_.size());
    auto value = [&](const Operand& op) -> std::optional<std::int64_t> {
      if (op.kind == OperandKind::imm) return op.imm;
      if (op.kind == OperandKind::reg) return values[static_cast<std::size_t>(op.reg)];
      return std::nullopt;
    };
    std::vector<char> counted(insns_.size(), 0);
    for (std::size_t i = first_clock_ + 1; i < second_clock_; ++i) {
      counted[i] = report_.timed_op.empty() || insns_[i].opcode == report_.timed_op;
    }
    std::uint64_t count = 0;
    std::uint64_t steps = 0;
    bool in_window = false;
    std::size_t pc = 0;
    while (pc < insns_.size()) {
      if (++steps > kStepLimit) {
        report_.notes.push_back(fmt::format("stopped after {} interpreted steps; timed count unknown", kStepLimit));
        return;
      }
      const auto& in = insns_[pc];
      if (in.guard >= 0) {
        auto g = values[static_cast<std::size_t>(in.guard)];
        if (!g) {
          if (in.exec == Exec::bra) {
            report_.notes.push_back(fmt::format(
                "branch at line {} depends on a value that is not known statically; timed count unknown", in.line));
            return;
          }
        } else if ((*g != 0) == in.guard_negated) {
          ++pc;
          continue;
        }
      }
      if (in.clock_read) {
        in_window = pc == first_clock_;
        values[static_cast<std::size_t>(in.dest)].reset();
        ++pc;
        continue;
      }
      if (in_window && counted[pc]) ++count;

      auto binary = [&](auto fn) {
        auto a = value(in.ops[1]);
        auto b = value(in.ops[2]);
        std::optional<std::int64_t> r;
        if (a && b) r = fn(static_cast<std::uint64_t>(*a), static_cast<std::uint64_t>(*b));
        values[static_cast<std::size_t>(in.dest)] = r;
      };
      switch (in.exec) {
        case Exec::mov:
          values[static_cast<std::size_t>(in.dest)] = in.ops.size() == 2 ? value(in.ops[1]) : std::nullopt;
          break;
        case Exec::add: binary([](auto a, auto b) { return static_cast<std::int64_t>(a + b); }); break;
        case Exec::sub: binary([](auto a, auto b) { return static_cast<std::int64_t>(a - b); }); break;
        case Exec::shl: binary([](auto a, auto b) { return static_cast<std::int64_t>(b < 64 ? a << b : 0); }); break;
        case Exec::mul: binary([](auto a, auto b) { return static_cast<std::int64_t>(a * b); }); break;
        case Exec::band: binary([](auto a, auto b) { return static_cast<std::int64_t>(a & b); }); break;
        case Exec::bor: binary([](auto a, auto b) { return static_cast<std::int64_t>(a | b); }); break;
        case Exec::bxor: binary([](auto a, auto b) { return static_cast<std::int64_t>(a ^ b); }); break;
        case Exec::setp: {
          auto a = value(in.ops[1]);
          auto b = value(in.ops[2]);
          std::optional<std::int64_t> r;
          if (a && b) r = compare(in, *a, *b) ? 1 : 0;
          values[static_cast<std::size_t>(in.dest)] = r;
          break;
        }
        case Exec::bra:
          pc = in.target_index;
          continue;
        case Exec::ret:
          pc = insns_.size();
          continue;
        case Exec::other:
          if (in.dest >= 0) values[static_cast<std::size_t>(in.dest)].reset();
          break;
      }
      ++pc;
    }
    report_.timed_count = count;
    if (report_.declared_timed_count && *report_.declared_timed_count != count) {
      error(insns_[first_clock_].line, report_.timed_op,
            fmt::format("header declares timed-count {} but the timed region executes {} '{}' instruction(s)",
                        *report_.declared_timed_count, count,
                        report_.timed_op.empty() ? "timed" : report_.timed_op));
    }
  }

  std::string_view text_;
  ValidationReport report_;
  State state_ = State::top;
  bool seen_version_ = false;
  bool seen_target_ = false;
  bool seen_address_size_ = false;
  std::set<std::string, std::less<>> symbols_;
  std::vector<RegDecl> reg_decls_;
  std::unordered_map<std::string, int> reg_ids_;
  std::map<std::string, std::size_t, std::less<>> labels_;
  std::vector<Insn> insns_;
  std::size_t first_clock_ = 0;
  std::size_t second_clock_ = 0;
};

}  // namespace

namespace detail {

void add_issue(ValidationReport& report, std::size_t line, std::string token, std::string message) {
  report.valid = false;
  report.issues.push_back({line, std::move(token), std::move(message)});
}

}  // namespace detail

std::string ValidationReport::summary() const {
  std::string out;
  if (valid) {
    out = fmt::format("valid: {} instructions ({} inside the timed region, {} outside)", instruction_count,
                      inside_window, outside_window);
    if (timed_count) {
      out += fmt::format(", timed count {}", *timed_count);
    } else {
      out += ", timed count unknown";
    }
    out += '\n';
  } else {
    out = "invalid\n";
    for (const auto& issue : issues) {
      out += fmt::format("  line {}: {}", issue.line, issue.message);
      if (!issue.token.empty()) out += fmt::format(" (at '{}')", issue.token);
      out += '\n';
    }
  }
  for (const auto& note : notes) out += fmt::format("  note: {}\n", note);
  return out;
}

ValidationReport validate_ptx(std::string_view text) {
  auto header = ptxlat::detail::find_bench_header(text);
  const bool wmma = header ? header->get("kind") == std::optional<std::string_view>("wmma")
                           : text.find("wmma::mma_sync") != std::string_view::npos;
  if (wmma) return detail::validate_wmma_source(text);
  return PtxValidator(text).run();
}

}  // namespace ptxlat::codegen
