// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/codegen.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include <fmt/format.h>

#include "bench_header.hpp"
#include "ptxlat/error.hpp"
#include "strings.hpp"

namespace ptxlat::codegen {

namespace {

constexpr std::string_view kClk32Suffix = "-clk32";
constexpr std::uint32_t kFragmentSets = 4;

// ---------------------------------------------------------------------------
// Registers
// ---------------------------------------------------------------------------

enum class RegClass : std::uint8_t { pred, b16, b32, f32, b64, f64 };
constexpr std::size_t kRegClasses = 6;

constexpr std::array<std::string_view, kRegClasses> kRegPrefix = {"p", "rs", "r", "f", "rd", "fd"};
constexpr std::array<std::string_view, kRegClasses> kRegDecl = {".pred", ".b16", ".b32",
                                                                ".f32",  ".b64", ".f64"};
constexpr std::array<std::string_view, kRegClasses> kMemType = {"", "b16", "b32", "f32", "b64", "f64"};

RegClass class_of(DataType type) {
  switch (type) {
    case DataType::pred: return RegClass::pred;
    case DataType::u32:
    case DataType::s32:
    case DataType::b32: return RegClass::b32;
    case DataType::f32:
    case DataType::tf32: return RegClass::f32;
    case DataType::u64:
    case DataType::s64:
    case DataType::b64: return RegClass::b64;
    case DataType::f64: return RegClass::f64;
    default: return RegClass::b16;
  }
}

std::size_t idx(RegClass c) { return static_cast<std::size_t>(c); }

class RegFile {
 public:
  std::string take(RegClass c) { return fmt::format("%{}{}", kRegPrefix[idx(c)], ++next_[idx(c)]); }

  std::string declarations() const {
    std::string out;
    for (std::size_t i = 0; i < kRegClasses; ++i) {
      if (next_[i] == 0) continue;
      out += fmt::format("\t.reg {} \t%{}<{}>;\n", kRegDecl[i], kRegPrefix[i], next_[i] + 1);
    }
    return out;
  }

 private:
  std::array<int, kRegClasses> next_{};
};

// ---------------------------------------------------------------------------
// Kernel text assembly
// ---------------------------------------------------------------------------

std::string entry_name(std::string_view id) {
  std::string out = "bench_";
  for (char c : id) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::string header_line(const BenchInfo& info) {
  std::string line = fmt::format("{} id={} kind={}", detail::kBenchHeaderTag, info.id, to_string(info.kind));
  if (!info.timed_op.empty()) line += fmt::format(" timed-op={}", info.timed_op);
  line += fmt::format(" timed-count={} clock={}\n", info.timed_count, to_string(info.clock_width));
  return line;
}

class PtxKernel {
 public:
  explicit PtxKernel(const BenchInfo& info) : name_(entry_name(info.id)) { text_ = header_line(info); }

  void comment(std::string_view text) { text_ += fmt::format("// {}\n", text); }
  void param(std::string_view suffix) { params_.push_back(fmt::format("{}_param_{}", name_, suffix)); }
  const std::string& param_name(std::size_t i) const { return params_.at(i); }
  void shared(std::string decl) { shared_.push_back(std::move(decl)); }

  void op(std::string_view text) {
    body_ += '\t';
    body_ += text;
    body_ += ";\n";
  }
  void label(std::string_view name) { body_ += fmt::format("{}:\n", name); }
  void blank() { body_ += '\n'; }

  RegFile& regs() { return regs_; }

  std::string finish() {
    std::string out = std::move(text_);
    out += "\n.version 7.0\n.target sm_80\n.address_size 64\n\n";
    out += fmt::format(".visible .entry {}(\n", name_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out += fmt::format("\t.param .u64 {}{}\n", params_[i], i + 1 < params_.size() ? "," : "");
    }
    out += ")\n{\n";
    out += regs_.declarations();
    for (const auto& s : shared_) out += fmt::format("\t{};\n", s);
    out += '\n';
    out += body_;
    out += "\tret;\n}\n";
    return out;
  }

 private:
  std::string name_;
  std::string text_;
  std::vector<std::string> params_;
  std::vector<std::string> shared_;
  std::string body_;
  RegFile regs_;
};

struct ClockRegs {
  RegClass cls;
  std::string_view read;  // "mov.u64" / "mov.u32"
  std::string_view special;
  std::string_view sub;
  std::string_view store;
};

ClockRegs clock_regs(ClockWidth width) {
  if (width == ClockWidth::bits32) return {RegClass::b32, "mov.u32", "%clock", "sub.s32", "st.global.u32"};
  return {RegClass::b64, "mov.u64", "%clock64", "sub.s64", "st.global.u64"};
}

std::string with_width(std::string id, ClockWidth width) {
  if (width == ClockWidth::bits32) id += kClk32Suffix;
  return id;
}

// Reads the clock into a fresh register and returns it.
std::string read_clock(PtxKernel& k, const ClockRegs& clk) {
  auto reg = k.regs().take(clk.cls);
  k.op(fmt::format("{} \t{}, {}", clk.read, reg, clk.special));
  return reg;
}

void store_delta(PtxKernel& k, const ClockRegs& clk, const std::string& start, const std::string& end,
                 std::string_view base) {
  auto delta = k.regs().take(clk.cls);
  k.op(fmt::format("{} \t{}, {}, {}", clk.sub, delta, end, start));
  k.op(fmt::format("{} \t[{}], {}", clk.store, base, delta));
}

// ---------------------------------------------------------------------------
// ALU operand shapes
// ---------------------------------------------------------------------------

enum class Shape : std::uint8_t {
  binary, wide, ternary, unary, count_bits, test, compare, convert, lop3, bfe, bfi, fns,
};

struct OpShape {
  std::string_view opcode;
  Shape shape;
};

constexpr std::array kOpShapes = {
    OpShape{"abs", Shape::unary},     OpShape{"add", Shape::binary},
    OpShape{"addc", Shape::binary},   OpShape{"and", Shape::binary},
    OpShape{"bfe", Shape::bfe},       OpShape{"bfi", Shape::bfi},
    OpShape{"bfind", Shape::count_bits}, OpShape{"brev", Shape::unary},
    OpShape{"clz", Shape::count_bits}, OpShape{"cnot", Shape::unary},
    OpShape{"copysign", Shape::binary}, OpShape{"cos", Shape::unary},
    OpShape{"cvt", Shape::convert},   OpShape{"div", Shape::binary},
    OpShape{"dp2a", Shape::ternary},  OpShape{"dp4a", Shape::ternary},
    OpShape{"ex2", Shape::unary},     OpShape{"fma", Shape::ternary},
    OpShape{"fns", Shape::fns},       OpShape{"lg2", Shape::unary},
    OpShape{"lop3", Shape::lop3},     OpShape{"mad", Shape::ternary},
    OpShape{"mad24", Shape::ternary}, OpShape{"max", Shape::binary},
    OpShape{"min", Shape::binary},    OpShape{"mul", Shape::binary},
    OpShape{"mul24", Shape::binary},  OpShape{"neg", Shape::unary},
    OpShape{"not", Shape::unary},     OpShape{"or", Shape::binary},
    OpShape{"popc", Shape::count_bits}, OpShape{"rcp", Shape::unary},
    OpShape{"rem", Shape::binary},    OpShape{"rsqrt", Shape::unary},
    OpShape{"sad", Shape::ternary},   OpShape{"setp", Shape::compare},
    OpShape{"sin", Shape::unary},     OpShape{"sqrt", Shape::unary},
    OpShape{"sub", Shape::binary},    OpShape{"tanh", Shape::unary},
    OpShape{"testp", Shape::test},    OpShape{"xor", Shape::binary},
};

const std::array<std::string_view, kOpShapes.size()> kSupportedOpcodes = [] {
  std::array<std::string_view, kOpShapes.size()> out{};
  for (std::size_t i = 0; i < kOpShapes.size(); ++i) out[i] = kOpShapes[i].opcode;
  return out;
}();

// One operand slot of an instruction: either a register of some class or a
// literal immediate.
struct Operand {
  std::optional<RegClass> reg;
  std::string_view imm;
};

struct OperandPlan {
  RegClass dest;
  std::vector<Operand> sources;
};

bool has_modifier(const InstructionSpec& spec, std::string_view m) {
  return std::find(spec.modifiers.begin(), spec.modifiers.end(), m) != spec.modifiers.end();
}

std::string supported_list() {
  return detail::join(std::vector<std::string>(kSupportedOpcodes.begin(), kSupportedOpcodes.end()), ", ");
}

OperandPlan plan_operands(const InstructionSpec& spec) {
  auto it = std::find_if(kOpShapes.begin(), kOpShapes.end(),
                         [&](const OpShape& s) { return s.opcode == spec.opcode; });
  if (it == kOpShapes.end()) {
    throw GenerationError(fmt::format("unsupported opcode '{}' in '{}'; supported opcodes: {}", spec.opcode,
                                      spec.ptx_name(), supported_list()));
  }
  Shape shape = it->shape;
  if (spec.opcode == "mul" && has_modifier(spec, "wide")) shape = Shape::wide;
  if (spec.opcode == "mad" && has_modifier(spec, "wide")) {
    throw GenerationError(fmt::format("'{}': mad.wide is not supported", spec.ptx_name()));
  }

  const RegClass src = class_of(spec.dtype);
  if (src == RegClass::pred) {
    throw GenerationError(fmt::format("'{}': predicate operands are not supported", spec.ptx_name()));
  }
  const Operand r{src, {}};
  auto imm = [](std::string_view v) { return Operand{std::nullopt, v}; };

  switch (shape) {
    case Shape::binary: return {src, {r, r}};
    case Shape::ternary: return {src, {r, r, r}};
    case Shape::unary: return {src, {r}};
    case Shape::wide: {
      if (bit_width(spec.dtype) == 16) return {RegClass::b32, {r, r}};
      if (bit_width(spec.dtype) == 32) return {RegClass::b64, {r, r}};
      throw GenerationError(fmt::format("'{}': wide multiply needs a 16- or 32-bit type", spec.ptx_name()));
    }
    case Shape::count_bits: return {RegClass::b32, {r}};
    case Shape::test: return {RegClass::pred, {r}};
    case Shape::compare: return {RegClass::pred, {r, r}};
    case Shape::convert: {
      for (const auto& m : spec.modifiers) {
        if (auto t = parse_data_type(m)) return {class_of(*t), {r}};
      }
      throw GenerationError(fmt::format("'{}': cvt needs a destination type modifier", spec.ptx_name()));
    }
    case Shape::lop3: return {src, {r, r, r, imm("0x96")}};
    case Shape::bfe: return {src, {r, imm("8"), imm("8")}};
    case Shape::bfi: return {src, {r, r, imm("8"), imm("8")}};
    case Shape::fns: return {RegClass::b32, {r, imm("0"), imm("1")}};
  }
  throw GenerationError(fmt::format("unsupported opcode '{}'", spec.opcode));
}

std::string join_operands(std::string_view dest, const std::vector<std::string>& srcs) {
  std::string out(dest);
  for (const auto& s : srcs) out += ", " + s;
  return out;
}

// ---------------------------------------------------------------------------
// WMMA source helpers
// ---------------------------------------------------------------------------

std::string_view fragment_type(DataType t) {
  switch (t) {
    case DataType::f16: return "half";
    case DataType::bf16: return "__nv_bfloat16";
    case DataType::tf32: return "wmma::precision::tf32";
    case DataType::f64: return "double";
    case DataType::u8: return "unsigned char";
    case DataType::u4: return "wmma::experimental::precision::u4";
    case DataType::f32: return "float";
    case DataType::u32: return "int";
    default: return "?";
  }
}

std::string_view storage_type(DataType t) {
  switch (t) {
    case DataType::tf32: return "float";
    case DataType::u4: return "unsigned";
    default: return fragment_type(t);
  }
}

std::string_view major(Layout l) { return l == Layout::row ? "wmma::row_major" : "wmma::col_major"; }
std::string_view mem_major(Layout l) { return l == Layout::row ? "wmma::mem_row_major" : "wmma::mem_col_major"; }

std::string_view accumulator_ptx(DataType t) { return t == DataType::u32 ? "s32" : to_string(t); }

}  // namespace

// ---------------------------------------------------------------------------
// Enum strings
// ---------------------------------------------------------------------------

std::string_view to_string(BenchKind kind) noexcept {
  switch (kind) {
    case BenchKind::clock_overhead: return "clock_overhead";
    case BenchKind::alu: return "alu";
    case BenchKind::memory: return "memory";
    case BenchKind::shared: return "shared";
    case BenchKind::wmma: return "wmma";
  }
  return "?";
}

std::optional<BenchKind> parse_bench_kind(std::string_view text) noexcept {
  for (auto k : {BenchKind::clock_overhead, BenchKind::alu, BenchKind::memory, BenchKind::shared,
                 BenchKind::wmma}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ClockWidth width) noexcept { return width == ClockWidth::bits32 ? "bits32" : "bits64"; }

std::optional<ClockWidth> parse_clock_width(std::string_view text) noexcept {
  if (text == "bits32") return ClockWidth::bits32;
  if (text == "bits64") return ClockWidth::bits64;
  return std::nullopt;
}

std::string_view to_string(ChaseLayout layout) noexcept {
  return layout == ChaseLayout::shuffled ? "shuffled" : "strided";
}

std::optional<ChaseLayout> parse_chase_layout(std::string_view text) noexcept {
  if (text == "shuffled") return ChaseLayout::shuffled;
  if (text == "strided") return ChaseLayout::strided;
  return std::nullopt;
}

std::string BenchInfo::file_name() const { return id + (kind == BenchKind::wmma ? ".cu" : ".ptx"); }

std::span<const std::string_view> supported_alu_opcodes() { return kSupportedOpcodes; }

bool supports_dependent_chain(const InstructionSpec& spec) {
  try {
    auto plan = plan_operands(spec);
    return plan.sources.front().reg && *plan.sources.front().reg == plan.dest;
  } catch (const GenerationError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

Microbenchmark gen_clock_overhead(ClockWidth clock_width) {
  BenchInfo info;
  info.id = with_width("clock.clock_overhead", clock_width);
  info.kind = BenchKind::clock_overhead;
  info.timed_count = 0;
  info.divisor = 1;
  info.clock_width = clock_width;

  PtxKernel k(info);
  k.comment("Cost of reading the clock: two back-to-back reads with nothing between them.");
  k.param("0");
  auto& regs = k.regs();
  auto param = regs.take(RegClass::b64);
  auto out = regs.take(RegClass::b64);
  k.op(fmt::format("ld.param.u64 \t{}, [{}]", param, k.param_name(0)));
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", out, param));
  auto clk = clock_regs(clock_width);
  auto start = read_clock(k, clk);
  auto end = read_clock(k, clk);
  store_delta(k, clk, start, end, out);
  return {std::move(info), k.finish()};
}

Microbenchmark gen_alu(const InstructionSpec& spec, ClockWidth clock_width) {
  if (spec.count == 0) throw GenerationError("instruction count must be at least 1");
  const OperandPlan plan = plan_operands(spec);
  const bool dependent = spec.dependency == Dependency::dependent;
  if (dependent && !supports_dependent_chain(spec)) {
    throw GenerationError(fmt::format(
        "'{}' cannot form a dependent chain: its result does not have the type of its first source",
        spec.ptx_name()));
  }

  BenchInfo info;
  info.id = with_width(spec.signature() + ".alu", clock_width);
  info.kind = BenchKind::alu;
  info.target = spec;
  info.timed_count = spec.count;
  info.divisor = spec.count;
  info.clock_width = clock_width;
  info.timed_op = spec.ptx_name();

  PtxKernel k(info);
  k.comment(fmt::format("Latency of {}: {} {} instruction{} between two clock reads.", spec.ptx_name(),
                        spec.count, dependent ? "dependent" : "independent", spec.count == 1 ? "" : "s"));
  k.param("0");
  auto& regs = k.regs();
  auto param = regs.take(RegClass::b64);
  auto base = regs.take(RegClass::b64);
  k.op(fmt::format("ld.param.u64 \t{}, [{}]", param, k.param_name(0)));
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", base, param));

  // Seeds come from memory so the compiler cannot fold the timed region.
  std::vector<std::string> sources;
  std::uint64_t offset = 8;
  for (const auto& operand : plan.sources) {
    if (!operand.reg) {
      sources.emplace_back(operand.imm);
      continue;
    }
    auto reg = regs.take(*operand.reg);
    k.op(fmt::format("ld.global.{} \t{}, [{}+{}]", kMemType[idx(*operand.reg)], reg, base, offset));
    offset += 8;
    sources.push_back(reg);
  }

  auto clk = clock_regs(clock_width);
  auto start = read_clock(k, clk);
  std::vector<std::string> results;
  const std::string name = spec.ptx_name();
  for (std::uint32_t i = 0; i < spec.count; ++i) {
    if (dependent) {
      k.op(fmt::format("{} \t{}", name, join_operands(sources.front(), sources)));
    } else {
      auto dest = regs.take(plan.dest);
      k.op(fmt::format("{} \t{}", name, join_operands(dest, sources)));
      results.push_back(dest);
    }
  }
  if (dependent) results.push_back(sources.front());
  auto end = read_clock(k, clk);
  store_delta(k, clk, start, end, base);

  for (const auto& reg : results) {
    std::string value = reg;
    RegClass cls = dependent ? *plan.sources.front().reg : plan.dest;
    if (cls == RegClass::pred) {
      value = regs.take(RegClass::b32);
      k.op(fmt::format("selp.u32 \t{}, 1, 0, {}", value, reg));
      cls = RegClass::b32;
    }
    k.op(fmt::format("st.global.{} \t[{}+{}], {}", kMemType[idx(cls)], base, offset, value));
    offset += 8;
  }
  return {std::move(info), k.finish()};
}

PointerChaseConfig default_chase(MemoryLevel level, const DeviceCapacities& capacities) {
  PointerChaseConfig chase;
  chase.cache_op = cache_operator(level);
  if (level == MemoryLevel::global) {
    const std::uint64_t elements = capacities.l2_bytes / chase.element_bytes + 1;
    chase.element_count = (elements + kChaseUnroll - 1) / kChaseUnroll * kChaseUnroll;
  }
  return chase;
}

Microbenchmark gen_memory(MemoryLevel level, const PointerChaseConfig& chase, const DeviceCapacities& capacities,
                          ClockWidth clock_width) {
  if (level != MemoryLevel::global && level != MemoryLevel::l2 && level != MemoryLevel::l1) {
    throw ConfigError(fmt::format("'{}' is not a pointer-chase level (use global, l2 or l1)", to_string(level)));
  }
  chase.validate();
  if (chase.cache_op != cache_operator(level)) {
    throw ConfigError(fmt::format("cache operator '{}' does not target {} (expected {})", to_string(chase.cache_op),
                                  to_string(level), to_string(cache_operator(level))));
  }
  const std::uint64_t footprint = chase.footprint_bytes();
  switch (level) {
    case MemoryLevel::global:
      if (footprint <= capacities.l2_bytes) {
        throw ConfigError(fmt::format("global chase footprint {} B must exceed the L2 capacity {} B", footprint,
                                      capacities.l2_bytes));
      }
      break;
    case MemoryLevel::l2:
      if (footprint >= capacities.l2_bytes) {
        throw ConfigError(fmt::format("L2 chase footprint {} B must be smaller than the L2 capacity {} B",
                                      footprint, capacities.l2_bytes));
      }
      break;
    default:
      if (footprint >= capacities.l1_bytes) {
        throw ConfigError(fmt::format("L1 chase footprint {} B must be smaller than the L1 capacity {} B",
                                      footprint, capacities.l1_bytes));
      }
      break;
  }

  const std::string load = fmt::format("ld.global.{}.u64", to_string(chase.cache_op));
  BenchInfo info;
  info.id = with_width(fmt::format("{}.memory", to_string(level)), clock_width);
  info.kind = BenchKind::memory;
  info.target = level;
  info.timed_count = chase.element_count;
  info.divisor = chase.element_count;
  info.clock_width = clock_width;
  info.chase = chase;
  info.timed_op = load;

  PtxKernel k(info);
  k.comment(fmt::format("Pointer chase over {} elements ({} B) with {}; one load per element.",
                        chase.element_count, footprint, load));
  k.comment("param 0: chain array, param 1: successor index per element, param 2: output.");
  k.param("0");
  k.param("1");
  k.param("2");
  auto& regs = k.regs();
  std::array<std::string, 3> params;
  for (std::size_t i = 0; i < 3; ++i) {
    params[i] = regs.take(RegClass::b64);
    k.op(fmt::format("ld.param.u64 \t{}, [{}]", params[i], k.param_name(i)));
  }
  auto chain = regs.take(RegClass::b64);
  auto next = regs.take(RegClass::b64);
  auto out = regs.take(RegClass::b64);
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", chain, params[0]));
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", next, params[1]));
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", out, params[2]));

  // Turn successor indices into absolute addresses.
  auto offset = regs.take(RegClass::b64);
  auto next_at = regs.take(RegClass::b64);
  auto slot = regs.take(RegClass::b64);
  auto index = regs.take(RegClass::b64);
  auto scaled = regs.take(RegClass::b64);
  auto address = regs.take(RegClass::b64);
  auto store_pred = regs.take(RegClass::pred);
  k.op(fmt::format("mov.u64 \t{}, 0", offset));
  k.label("$Lstore");
  k.op(fmt::format("add.u64 \t{}, {}, {}", next_at, next, offset));
  k.op(fmt::format("add.u64 \t{}, {}, {}", slot, chain, offset));
  for (std::uint32_t u = 0; u < chase.unroll; ++u) {
    const std::string disp = u == 0 ? "" : fmt::format("+{}", u * chase.element_bytes);
    k.op(fmt::format("ld.global.u64 \t{}, [{}{}]", index, next_at, disp));
    k.op(fmt::format("shl.b64 \t{}, {}, 3", scaled, index));
    k.op(fmt::format("add.u64 \t{}, {}, {}", address, chain, scaled));
    k.op(fmt::format("st.wt.global.u64 \t[{}{}], {}", slot, disp, address));
  }
  k.op(fmt::format("add.u64 \t{}, {}, {}", offset, offset, chase.unroll * chase.element_bytes));
  k.op(fmt::format("setp.lt.u64 \t{}, {}, {}", store_pred, offset, footprint));
  k.op(fmt::format("@{} bra \t$Lstore", store_pred));
  k.blank();

  auto cursor = regs.take(RegClass::b64);
  auto loaded = regs.take(RegClass::b64);
  auto load_pred = regs.take(RegClass::pred);
  k.op(fmt::format("mov.u64 \t{}, {}", cursor, chain));
  k.op(fmt::format("mov.u64 \t{}, 0", loaded));
  auto clk = clock_regs(clock_width);
  auto start = read_clock(k, clk);
  k.label("$Lchase");
  for (std::uint32_t u = 0; u < chase.unroll; ++u) {
    k.op(fmt::format("{} \t{}, [{}]", load, cursor, cursor));
  }
  k.op(fmt::format("add.u64 \t{}, {}, {}", loaded, loaded, chase.unroll));
  k.op(fmt::format("setp.lt.u64 \t{}, {}, {}", load_pred, loaded, chase.element_count));
  k.op(fmt::format("@{} bra \t$Lchase", load_pred));
  auto end = read_clock(k, clk);
  store_delta(k, clk, start, end, out);
  k.op(fmt::format("st.global.u64 \t[{}+8], {}", out, cursor));
  return {std::move(info), k.finish()};
}

Microbenchmark gen_shared(SharedDirection direction, ClockWidth clock_width) {
  const bool load = direction == SharedDirection::load;
  const MemoryLevel level = load ? MemoryLevel::shared_load : MemoryLevel::shared_store;
  BenchInfo info;
  info.id = with_width(fmt::format("{}.shared", to_string(level)), clock_width);
  info.kind = BenchKind::shared;
  info.target = level;
  info.timed_count = 1;
  info.divisor = 1;
  info.clock_width = clock_width;
  info.timed_op = load ? "ld.shared.u64" : "st.shared.u64";
  info.subtract_followup = true;

  PtxKernel k(info);
  k.comment(fmt::format("Shared-memory {} followed by a dependent add.u64; subtract the add when analysing.",
                        load ? "load" : "store"));
  k.param("0");
  k.shared(".shared .align 8 .u64 shMem1[1]");
  auto& regs = k.regs();
  auto param = regs.take(RegClass::b64);
  auto out = regs.take(RegClass::b64);
  k.op(fmt::format("ld.param.u64 \t{}, [{}]", param, k.param_name(0)));
  k.op(fmt::format("cvta.to.global.u64 \t{}, {}", out, param));
  auto clk = clock_regs(clock_width);
  auto start = read_clock(k, clk);
  auto value = regs.take(RegClass::b64);
  auto follow = regs.take(RegClass::b64);
  if (load) {
    k.op(fmt::format("ld.shared.u64 \t{}, [shMem1]", value));
    k.op(fmt::format("add.u64 \t{}, {}, 1", follow, value));
  } else {
    k.op("st.shared.u64 \t[shMem1], 50");
    k.op(fmt::format("mov.u64 \t{}, 50", value));
    k.op(fmt::format("add.u64 \t{}, {}, 1", follow, value));
  }
  auto end = read_clock(k, clk);
  store_delta(k, clk, start, end, out);
  k.op(fmt::format("st.global.u64 \t[{}+8], {}", out, follow));
  return {std::move(info), k.finish()};
}

std::string default_ptx_instruction(const TensorCoreOp& op) {
  std::string out = fmt::format("wmma.mma.sync.aligned.{}.{}.{}", to_string(op.layout_a), to_string(op.layout_b),
                                op.shape.to_string());
  if (op.in_type == DataType::f16) {
    out += fmt::format(".{}.{}", to_string(op.acc_type), to_string(op.acc_type));
  } else {
    auto acc = accumulator_ptx(op.acc_type);
    out += fmt::format(".{}.{}.{}.{}", acc, to_string(op.in_type), to_string(op.in_type), acc);
  }
  if (op.in_type == DataType::f64) out += ".rn";
  return out;
}

TensorCoreOp tensor_op_for(std::string_view signature, const LatencyTable& table) {
  auto sig = parse_tensor_signature(signature);
  if (!is_supported_tensor_shape(sig.shape, sig.in_type, sig.acc_type)) {
    throw GenerationError(fmt::format("unsupported tensor op '{}'; supported: {}", signature,
                                      describe_supported_tensor_shapes()));
  }
  for (const auto& op : table.tensor_ops()) {
    if (op.in_type != sig.in_type || op.acc_type != sig.acc_type) continue;
    TensorCoreOp out = op;
    if (!(out.shape == sig.shape)) {
      out.shape = sig.shape;
      out.ptx_instruction = default_ptx_instruction(out);
    }
    return out;
  }
  throw GenerationError(fmt::format("no tensor op for {}/{} in the latency table", to_string(sig.in_type),
                                    to_string(sig.acc_type)));
}

Microbenchmark gen_wmma(const TensorCoreOp& op_in, std::uint32_t iters, ClockWidth clock_width) {
  if (!is_supported_tensor_shape(op_in.shape, op_in.in_type, op_in.acc_type)) {
    throw GenerationError(fmt::format("unsupported tensor op '{}'; supported: {}", op_in.signature(),
                                      describe_supported_tensor_shapes()));
  }
  if (iters == 0) throw GenerationError("wmma iteration count must be at least 1");
  TensorCoreOp op = op_in;
  op.iters = static_cast<int>(iters);
  if (op.ptx_instruction.empty()) op.ptx_instruction = default_ptx_instruction(op);

  std::string id = op.signature();
  if (iters != kDefaultWmmaIters) id += fmt::format("x{}", iters);
  BenchInfo info;
  info.id = with_width(id + ".wmma", clock_width);
  info.kind = BenchKind::wmma;
  info.timed_count = std::uint64_t{kFragmentSets} * iters;
  info.divisor = info.timed_count;
  info.clock_width = clock_width;
  info.timed_op = "wmma::mma_sync";
  info.iters = iters;
  info.target = op;

  const auto& s = op.shape;
  const auto a_t = fragment_type(op.in_type);
  const auto acc_t = fragment_type(op.acc_type);
  const auto in_store = storage_type(op.in_type);
  const auto acc_store = storage_type(op.acc_type);
  const bool wide = clock_width == ClockWidth::bits64;
  const std::string_view clock_t = wide ? "long long" : "unsigned int";
  const std::string_view clock_fn = wide ? "clock64()" : "clock()";
  const std::string lda = op.layout_a == Layout::row ? "K" : "M";
  const std::string ldb = op.layout_b == Layout::row ? "N" : "K";

  std::string t = header_line(info);
  t += fmt::format("// ptx: {}\n", op.ptx_instruction);
  t += fmt::format("// sass: {}*{}\n", op.sass_count, op.sass_opcode.empty() ? "?" : op.sass_opcode);
  t += fmt::format("// per-op latency = (clocks[0] - clock overhead) / {}\n", info.divisor);
  t += "#include <mma.h>\n#include <cuda_fp16.h>\n#include <cuda_bf16.h>\n\nusing namespace nvcuda;\n\n";
  t += fmt::format("constexpr int M = {};\nconstexpr int N = {};\nconstexpr int K = {};\n\n", s.m, s.n, s.k);
  t += fmt::format("__global__ void {}(const {}* a, const {}* b, const {}* c, {}* d, {}* clocks) {{\n",
                   entry_name(info.id), in_store, in_store, acc_store, acc_store, clock_t);
  auto frag_names = [](char tag) {
    std::vector<std::string> names;
    for (std::uint32_t i = 0; i < kFragmentSets; ++i) names.push_back(fmt::format("{}{}_frag", tag, i));
    return detail::join(names, ", ");
  };
  t += fmt::format("  wmma::fragment<wmma::matrix_a, M, N, K, {}, {}> {};\n", a_t, major(op.layout_a),
                   frag_names('a'));
  t += fmt::format("  wmma::fragment<wmma::matrix_b, M, N, K, {}, {}> {};\n", a_t, major(op.layout_b),
                   frag_names('b'));
  t += fmt::format("  wmma::fragment<wmma::accumulator, M, N, K, {}> {};\n\n", acc_t, frag_names('c'));
  for (std::uint32_t i = 0; i < kFragmentSets; ++i) {
    t += fmt::format("  wmma::load_matrix_sync(a{}_frag, a + {} * M * K, {});\n", i, i, lda);
    t += fmt::format("  wmma::load_matrix_sync(b{}_frag, b + {} * K * N, {});\n", i, i, ldb);
    t += fmt::format("  wmma::load_matrix_sync(c{}_frag, c + {} * M * N, N, {});\n", i, i, mem_major(op.layout_c));
  }
  t += fmt::format("\n  {} start_time = {};\n", clock_t, clock_fn);
  t += fmt::format("  for (int i = 0; i < {}; i++) {{\n", iters);
  for (std::uint32_t i = 0; i < kFragmentSets; ++i) {
    t += fmt::format("    wmma::mma_sync(c{0}_frag, a{0}_frag, b{0}_frag, c{0}_frag);\n", i);
  }
  t += "  }\n";
  t += fmt::format("  {} end_time = {};\n\n", clock_t, clock_fn);
  for (std::uint32_t i = 0; i < kFragmentSets; ++i) {
    t += fmt::format("  wmma::store_matrix_sync(d + {} * M * N, c{}_frag, N, {});\n", i, i, mem_major(op.layout_c));
  }
  t += "  if (threadIdx.x == 0) clocks[0] = end_time - start_time;\n}\n";
  return {std::move(info), std::move(t)};
}

// ---------------------------------------------------------------------------

BenchInfo bench_from_id(std::string_view id, const LatencyTable& table, const DeviceCapacities& capacities) {
  std::string_view rest = detail::trim(id);
  ClockWidth width = ClockWidth::bits64;
  if (rest.ends_with(kClk32Suffix)) {
    width = ClockWidth::bits32;
    rest.remove_suffix(kClk32Suffix.size());
  }
  auto dot = rest.rfind('.');
  if (dot == std::string_view::npos) {
    throw ParseError(fmt::format("benchmark id '{}' has no kind suffix", id), std::string(id));
  }
  auto kind = parse_bench_kind(rest.substr(dot + 1));
  if (!kind) {
    throw ParseError(fmt::format("unknown benchmark kind '{}' in id '{}'", rest.substr(dot + 1), id),
                     std::string(rest.substr(dot + 1)));
  }
  std::string_view target = rest.substr(0, dot);
  switch (*kind) {
    case BenchKind::clock_overhead:
      return gen_clock_overhead(width).info;
    case BenchKind::alu:
      return gen_alu(parse_signature(target), width).info;
    case BenchKind::memory: {
      auto level = parse_memory_level(target);
      if (!level) throw ParseError(fmt::format("unknown memory level '{}'", target), std::string(target));
      return gen_memory(*level, default_chase(*level, capacities), capacities, width).info;
    }
    case BenchKind::shared: {
      if (target == "shared_load") return gen_shared(SharedDirection::load, width).info;
      if (target == "shared_store") return gen_shared(SharedDirection::store, width).info;
      throw ParseError(fmt::format("unknown shared benchmark '{}'", target), std::string(target));
    }
    case BenchKind::wmma: {
      std::uint32_t iters = kDefaultWmmaIters;
      if (auto x = target.rfind('x'); x != std::string_view::npos) {
        if (auto n = detail::parse_int<std::uint32_t>(target.substr(x + 1))) {
          iters = *n;
          target = target.substr(0, x);
        }
      }
      return gen_wmma(tensor_op_for(target, table), iters, width).info;
    }
  }
  throw ParseError(fmt::format("unknown benchmark id '{}'", id), std::string(id));
}

Microbenchmark regenerate(const BenchInfo& info, const DeviceCapacities& capacities) {
  auto missing = [&info](std::string_view what) {
    return GenerationError(fmt::format("benchmark '{}' has no {}", info.id, what));
  };
  switch (info.kind) {
    case BenchKind::clock_overhead:
      return gen_clock_overhead(info.clock_width);
    case BenchKind::alu:
      if (!info.instruction()) throw missing("instruction");
      return gen_alu(*info.instruction(), info.clock_width);
    case BenchKind::memory:
      if (!info.memory_level() || !info.chase) throw missing("memory level or chase");
      return gen_memory(*info.memory_level(), *info.chase, capacities, info.clock_width);
    case BenchKind::shared:
      if (!info.memory_level()) throw missing("memory level");
      return gen_shared(*info.memory_level() == MemoryLevel::shared_store ? SharedDirection::store : SharedDirection::load,
                        info.clock_width);
    case BenchKind::wmma:
      if (!info.tensor_op()) throw missing("tensor op");
      return gen_wmma(*info.tensor_op(), info.iters, info.clock_width);
  }
  throw missing("kind");
}

std::filesystem::path write_kernel(const Microbenchmark& bench, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto path = dir / bench.info.file_name();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << bench.source_text;
  return path;
}

}  // namespace ptxlat::codegen

namespace ptxlat::detail {

std::optional<BenchHeader> find_bench_header(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    auto line = trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
    ++line_no;
    if (line.starts_with(kBenchHeaderTag)) {
      BenchHeader header;
      header.line = line_no;
      for (auto field : split_ws(line.substr(kBenchHeaderTag.size()))) {
        auto eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        header.fields.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
      }
      return header;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return std::nullopt;
}

}  // namespace ptxlat::detail
