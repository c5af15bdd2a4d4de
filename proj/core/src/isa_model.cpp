// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/isa_model.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ptxlat/error.hpp"
#include "strings.hpp"

namespace ptxlat {

std::string format_cycles(const Cycles& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return fmt::format("{}/{}", value.numerator(), value.denominator());
}

Cycles parse_cycles(std::string_view text) {
  text = detail::trim(text);
  auto slash = text.find('/');
  auto num = detail::parse_int<std::int64_t>(text.substr(0, slash));
  if (!num) throw ParseError(fmt::format("invalid cycle count '{}'", text), std::string(text));
  if (slash == std::string_view::npos) return Cycles(*num);
  auto den = detail::parse_int<std::int64_t>(text.substr(slash + 1));
  if (!den || *den <= 0) throw ParseError(fmt::format("invalid cycle count '{}'", text), std::string(text));
  return Cycles(*num, *den);
}

// ---------------------------------------------------------------------------

namespace {

struct DataTypeInfo {
  DataType type;
  std::string_view name;
  int bits;
};

constexpr std::array<DataTypeInfo, kAllDataTypes.size()> kDataTypeInfo = {{
    {DataType::u16, "u16", 16},   {DataType::u32, "u32", 32},   {DataType::u64, "u64", 64},
    {DataType::s16, "s16", 16},   {DataType::s32, "s32", 32},   {DataType::s64, "s64", 64},
    {DataType::f16, "f16", 16},   {DataType::bf16, "bf16", 16}, {DataType::tf32, "tf32", 32},
    {DataType::f32, "f32", 32},   {DataType::f64, "f64", 64},   {DataType::b16, "b16", 16},
    {DataType::b32, "b32", 32},   {DataType::b64, "b64", 64},   {DataType::u8, "u8", 8},
    {DataType::u4, "u4", 4},      {DataType::pred, "pred", 1},
}};

const DataTypeInfo& info(DataType type) {
  return kDataTypeInfo[static_cast<std::size_t>(type)];
}

bool is_identifier_piece(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace

int bit_width(DataType type) noexcept { return info(type).bits; }

std::string_view to_string(DataType type) noexcept { return info(type).name; }

std::optional<DataType> parse_data_type(std::string_view text) noexcept {
  for (const auto& entry : kDataTypeInfo) {
    if (entry.name == text) return entry.type;
  }
  return std::nullopt;
}

bool narrower_than(DataType a, DataType b) noexcept {
  if (bit_width(a) != bit_width(b)) return bit_width(a) < bit_width(b);
  return static_cast<int>(a) < static_cast<int>(b);
}

bool is_float(DataType type) noexcept {
  switch (type) {
    case DataType::f16:
    case DataType::bf16:
    case DataType::tf32:
    case DataType::f32:
    case DataType::f64:
      return true;
    default:
      return false;
  }
}

bool is_signed_int(DataType type) noexcept {
  return type == DataType::s16 || type == DataType::s32 || type == DataType::s64;
}

// ---------------------------------------------------------------------------

std::string InstructionSpec::ptx_name() const {
  std::string out = opcode;
  for (const auto& m : modifiers) {
    out += '.';
    out += m;
  }
  out += '.';
  out += to_string(dtype);
  return out;
}

std::string InstructionSpec::key() const {
  return dependency == Dependency::dependent ? ptx_name() + ":dep" : ptx_name();
}

std::string InstructionSpec::signature() const {
  std::string out = key();
  if (count != kDefaultInstructionCount) out += fmt::format("x{}", count);
  return out;
}

InstructionSpec parse_signature(std::string_view text) {
  const std::string original(text);
  text = detail::trim(text);
  if (text.empty()) throw ParseError("empty instruction signature", original);

  InstructionSpec spec;

  // Trailing "x<count>", optionally separated by ':'.
  if (auto x = text.rfind('x'); x != std::string_view::npos && x + 1 < text.size()) {
    std::string_view digits = text.substr(x + 1);
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      std::string_view head = text.substr(0, x);
      bool after_type = !head.empty() && (std::isdigit(static_cast<unsigned char>(head.back())) ||
                                          head.back() == ':' || head.ends_with("dep") ||
                                          head.ends_with("pred"));
      if (after_type) {
        auto count = detail::parse_int<std::uint32_t>(digits);
        if (!count) throw ParseError(fmt::format("invalid instruction count '{}'", digits), std::string(digits));
        if (*count == 0) throw ParseError("instruction count must be at least 1", std::string(digits));
        spec.count = *count;
        text = head;
        if (text.ends_with(':')) text.remove_suffix(1);
      }
    }
  }

  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    std::string_view suffix = text.substr(colon + 1);
    if (suffix == "dep") {
      spec.dependency = Dependency::dependent;
    } else if (suffix == "indep") {
      spec.dependency = Dependency::independent;
    } else {
      throw ParseError(fmt::format("unknown dependency suffix '{}' (expected dep or indep)", suffix),
                       std::string(suffix));
    }
    text = text.substr(0, colon);
  }

  auto parts = detail::split(text, '.');
  if (parts.size() < 2) {
    throw ParseError(fmt::format("signature '{}' needs an opcode and a data type", original),
                     std::string(text));
  }
  for (auto part : parts) {
    if (!is_identifier_piece(part)) {
      throw ParseError(fmt::format("invalid token '{}' in signature '{}'", part, original),
                       std::string(part));
    }
  }
  if (!(parts.front()[0] >= 'a' && parts.front()[0] <= 'z')) {
    throw ParseError(fmt::format("invalid opcode '{}'", parts.front()), std::string(parts.front()));
  }
  auto dtype = parse_data_type(parts.back());
  if (!dtype) {
    throw ParseError(fmt::format("unknown data type '{}' in signature '{}'", parts.back(), original),
                     std::string(parts.back()));
  }
  spec.opcode = std::string(parts.front());
  for (std::size_t i = 1; i + 1 < parts.size(); ++i) spec.modifiers.emplace_back(parts[i]);
  spec.dtype = *dtype;
  return spec;
}

// ---------------------------------------------------------------------------

std::string_view to_string(MemoryLevel level) noexcept {
  switch (level) {
    case MemoryLevel::global: return "global";
    case MemoryLevel::l2: return "l2";
    case MemoryLevel::l1: return "l1";
    case MemoryLevel::shared_load: return "shared_load";
    case MemoryLevel::shared_store: return "shared_store";
  }
  return "?";
}

std::optional<MemoryLevel> parse_memory_level(std::string_view text) noexcept {
  for (auto level : kAllMemoryLevels) {
    if (to_string(level) == text) return level;
  }
  return std::nullopt;
}

std::string_view to_string(CacheOp op) noexcept {
  switch (op) {
    case CacheOp::cv: return "cv";
    case CacheOp::cg: return "cg";
    case CacheOp::ca: return "ca";
    case CacheOp::none: return "none";
  }
  return "?";
}

std::optional<CacheOp> parse_cache_op(std::string_view text) noexcept {
  for (auto op : {CacheOp::cv, CacheOp::cg, CacheOp::ca, CacheOp::none}) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

CacheOp cache_operator(MemoryLevel level) noexcept {
  switch (level) {
    case MemoryLevel::global: return CacheOp::cv;
    case MemoryLevel::l2: return CacheOp::cg;
    case MemoryLevel::l1: return CacheOp::ca;
    default: return CacheOp::none;
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(Layout layout) noexcept {
  return layout == Layout::row ? "row" : "col";
}

std::optional<Layout> parse_layout(std::string_view text) noexcept {
  if (text == "row") return Layout::row;
  if (text == "col") return Layout::col;
  return std::nullopt;
}

std::string TensorShape::to_string() const { return fmt::format("m{}n{}k{}", m, n, k); }

std::optional<TensorShape> parse_tensor_shape(std::string_view text) noexcept {
  // m<digits>n<digits>k<digits>
  TensorShape shape;
  std::size_t pos = 0;
  auto field = [&](char tag, int& out) {
    if (pos >= text.size() || text[pos] != tag) return false;
    std::size_t start = ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    auto value = detail::parse_int<int>(text.substr(start, pos - start));
    if (!value || *value <= 0) return false;
    out = *value;
    return true;
  };
  if (!field('m', shape.m) || !field('n', shape.n) || !field('k', shape.k) || pos != text.size()) {
    return std::nullopt;
  }
  return shape;
}

std::span<const TensorShapeSupport> supported_tensor_shapes() {
  static const std::vector<TensorShapeSupport> kSupport = {
      {DataType::f16, DataType::f16, {{16, 16, 16}, {8, 32, 16}, {32, 8, 16}}},
      {DataType::f16, DataType::f32, {{16, 16, 16}, {8, 32, 16}, {32, 8, 16}}},
      {DataType::bf16, DataType::f32, {{16, 16, 16}, {8, 32, 16}, {32, 8, 16}}},
      {DataType::tf32, DataType::f32, {{16, 16, 8}}},
      {DataType::f64, DataType::f64, {{8, 8, 4}}},
      {DataType::u8, DataType::u32, {{16, 16, 16}, {32, 8, 16}, {8, 32, 16}}},
      {DataType::u4, DataType::u32, {{8, 8, 32}}},
  };
  return kSupport;
}

bool is_supported_tensor_shape(const TensorShape& shape, DataType in_type, DataType acc_type) {
  for (const auto& s : supported_tensor_shapes()) {
    if (s.in_type == in_type && s.acc_type == acc_type) {
      return std::find(s.shapes.begin(), s.shapes.end(), shape) != s.shapes.end();
    }
  }
  return false;
}

std::string describe_supported_tensor_shapes() {
  std::vector<std::string> rows;
  for (const auto& s : supported_tensor_shapes()) {
    std::vector<std::string> shapes;
    for (const auto& shape : s.shapes) shapes.push_back(shape.to_string());
    rows.push_back(fmt::format("{}/{}: {}", to_string(s.in_type), to_string(s.acc_type),
                               detail::join(shapes, " ")));
  }
  return detail::join(rows, "; ");
}

std::string TensorCoreOp::signature() const {
  return fmt::format("{}.{}.{}", shape.to_string(), to_string(in_type), to_string(acc_type));
}

TensorSignature parse_tensor_signature(std::string_view text) {
  auto parts = detail::split(detail::trim(text), '.');
  if (parts.size() != 3) {
    throw ParseError(fmt::format("tensor op signature '{}' must be <shape>.<inputs>.<accumulator>", text),
                     std::string(text));
  }
  auto shape = parse_tensor_shape(parts[0]);
  if (!shape) throw ParseError(fmt::format("invalid WMMA shape '{}'", parts[0]), std::string(parts[0]));
  auto in = parse_data_type(parts[1]);
  if (!in) throw ParseError(fmt::format("unknown data type '{}'", parts[1]), std::string(parts[1]));
  auto acc = parse_data_type(parts[2]);
  if (!acc) throw ParseError(fmt::format("unknown data type '{}'", parts[2]), std::string(parts[2]));
  return {*shape, *in, *acc};
}

// ---------------------------------------------------------------------------

std::string_view to_string(Source source) noexcept {
  return source == Source::measured ? "measured" : "paper_seed";
}

std::optional<Source> parse_source(std::string_view text) noexcept {
  if (text == "measured") return Source::measured;
  if (text == "paper_seed") return Source::paper_seed;
  return std::nullopt;
}

void LatencyRecord::validate() const {
  if (signature.empty()) throw ValidationError("latency record without a signature");
  if (cycles_min < 0) {
    throw ValidationError(fmt::format("{}: negative cycle count {}", signature, format_cycles(cycles_min)));
  }
  if (cycles_min > cycles_max) {
    throw ValidationError(fmt::format("{}: cycles_min {} exceeds cycles_max {}", signature,
                                      format_cycles(cycles_min), format_cycles(cycles_max)));
  }
  if (!mapping.multi_instruction && mapping.expansion.empty()) {
    throw ValidationError(fmt::format("{}: empty SASS expansion", signature));
  }
}

const LatencyRecord* LatencyTable::find(std::string_view signature) const noexcept {
  for (const auto& r : records_) {
    if (r.signature == signature) return &r;
  }
  return nullptr;
}

void LatencyTable::add(LatencyRecord record) {
  record.validate();
  if (find(record.signature)) {
    throw ValidationError(fmt::format("duplicate signature '{}'", record.signature));
  }
  records_.push_back(std::move(record));
}

void LatencyTable::put(LatencyRecord record) {
  record.validate();
  for (auto& r : records_) {
    if (r.signature == record.signature) {
      r = std::move(record);
      return;
    }
  }
  records_.push_back(std::move(record));
}

bool LatencyTable::remove(std::string_view signature) {
  auto it = std::find_if(records_.begin(), records_.end(),
                         [&](const LatencyRecord& r) { return r.signature == signature; });
  if (it == records_.end()) return false;
  records_.erase(it);
  return true;
}

std::optional<Cycles> LatencyTable::memory_cycles(MemoryLevel level) const {
  auto it = memory_.find(level);
  if (it == memory_.end()) return std::nullopt;
  return it->second.cycles;
}

const TensorCoreOp* LatencyTable::find_tensor_op(std::string_view signature) const noexcept {
  for (const auto& op : tensor_ops_) {
    if (op.signature() == signature) return &op;
  }
  return nullptr;
}

void LatencyTable::add_tensor_op(TensorCoreOp op) {
  if (find_tensor_op(op.signature())) {
    throw ValidationError(fmt::format("duplicate tensor op '{}'", op.signature()));
  }
  tensor_ops_.push_back(std::move(op));
}

void LatencyTable::put_tensor_op(TensorCoreOp op) {
  for (auto& existing : tensor_ops_) {
    if (existing.signature() == op.signature()) {
      existing = std::move(op);
      return;
    }
  }
  tensor_ops_.push_back(std::move(op));
}

}  // namespace ptxlat
