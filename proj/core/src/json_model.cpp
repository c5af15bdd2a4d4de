// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "json_model.hpp"

#include <fmt/format.h>

#include "ptxlat/error.hpp"

namespace ptxlat::detail {

namespace {

template <typename Enum, typename Parse>
Enum parse_enum(const json& object, std::string_view field, Parse parse) {
  auto text = require_string(object, field);
  auto value = parse(text);
  if (!value) throw ParseError(fmt::format("invalid value '{}' for '{}'", text, field), text);
  return *value;
}

template <typename Int>
Int require_uint(const json& object, std::string_view field) {
  const auto& v = require(object, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ParseError(fmt::format("field '{}' must be a non-negative integer", field), std::string(field));
  }
  return v.get<Int>();
}

}  // namespace

const json& require(const json& object, std::string_view field) {
  if (!object.is_object()) throw ParseError(fmt::format("expected an object holding '{}'", field));
  auto it = object.find(field);
  if (it == object.end()) throw ParseError(fmt::format("missing field '{}'", field), std::string(field));
  return *it;
}

std::string require_string(const json& object, std::string_view field) {
  const auto& v = require(object, field);
  if (!v.is_string()) throw ParseError(fmt::format("field '{}' must be a string", field), std::string(field));
  return v.get<std::string>();
}

json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string token = offset < text.size() ? std::string(1, text[offset]) : std::string("<end of input>");
    throw ParseError(fmt::format("{}: malformed JSON at line {}, column {}", what, line, column), token, line);
  }
}

json cycles_to_json(const Cycles& value) {
  if (value.denominator() == 1) return value.numerator();
  return format_cycles(value);
}

Cycles cycles_from_json(const json& value, std::string_view field) {
  if (value.is_number_integer()) return Cycles(value.get<std::int64_t>());
  if (value.is_string()) return parse_cycles(value.get<std::string>());
  if (value.is_number_float()) {
    double d = value.get<double>();
    auto whole = static_cast<std::int64_t>(d);
    if (static_cast<double>(whole) == d) return Cycles(whole);
  }
  throw ParseError(fmt::format("field '{}' must be an integer or \"p/q\"", field), std::string(field));
}

json tensor_op_to_json(const TensorCoreOp& op) {
  json j = {
      {"shape", op.shape.to_string()},
      {"in_type", to_string(op.in_type)},
      {"acc_type", to_string(op.acc_type)},
      {"layout_a", to_string(op.layout_a)},
      {"layout_b", to_string(op.layout_b)},
      {"layout_c", to_string(op.layout_c)},
      {"ptx_instruction", op.ptx_instruction},
      {"sass_opcode", op.sass_opcode},
      {"sass_count", op.sass_count},
      {"per_sass_cycles", op.per_sass_cycles},
      {"iters", op.iters},
  };
  if (op.measured_throughput) j["measured_throughput"] = *op.measured_throughput;
  if (op.theoretical_throughput) j["theoretical_throughput"] = *op.theoretical_throughput;
  return j;
}

TensorCoreOp tensor_op_from_json(const json& value) {
  TensorCoreOp op;
  auto shape_text = require_string(value, "shape");
  auto shape = parse_tensor_shape(shape_text);
  if (!shape) throw ParseError(fmt::format("invalid WMMA shape '{}'", shape_text), shape_text);
  op.shape = *shape;
  op.in_type = parse_enum<DataType>(value, "in_type", parse_data_type);
  op.acc_type = parse_enum<DataType>(value, "acc_type", parse_data_type);
  op.layout_a = parse_enum<Layout>(value, "layout_a", parse_layout);
  op.layout_b = parse_enum<Layout>(value, "layout_b", parse_layout);
  op.layout_c = parse_enum<Layout>(value, "layout_c", parse_layout);
  op.ptx_instruction = value.value("ptx_instruction", "");
  op.sass_opcode = value.value("sass_opcode", "");
  op.sass_count = value.value("sass_count", 1);
  op.per_sass_cycles = value.value("per_sass_cycles", 1);
  op.iters = value.value("iters", 1);
  if (op.sass_count < 1 || op.per_sass_cycles < 1 || op.iters < 1) {
    throw ValidationError(fmt::format("tensor op '{}' needs positive counts", op.signature()));
  }
  if (auto it = value.find("measured_throughput"); it != value.end() && it->is_number()) {
    op.measured_throughput = it->get<double>();
  }
  if (auto it = value.find("theoretical_throughput"); it != value.end() && it->is_number()) {
    op.theoretical_throughput = it->get<double>();
  }
  return op;
}

json chase_to_json(const codegen::PointerChaseConfig& chase) {
  return {
      {"element_count", chase.element_count},
      {"element_bytes", chase.element_bytes},
      {"cache_op", to_string(chase.cache_op)},
      {"unroll", chase.unroll},
      {"layout", codegen::to_string(chase.layout)},
      {"stride", chase.stride},
      {"seed", chase.seed},
  };
}

codegen::PointerChaseConfig chase_from_json(const json& value) {
  codegen::PointerChaseConfig chase;
  chase.element_count = require_uint<std::uint64_t>(value, "element_count");
  chase.element_bytes = value.value("element_bytes", chase.element_bytes);
  chase.cache_op = parse_enum<CacheOp>(value, "cache_op", parse_cache_op);
  chase.unroll = value.value("unroll", chase.unroll);
  if (value.contains("layout")) chase.layout = parse_enum<codegen::ChaseLayout>(value, "layout", codegen::parse_chase_layout);
  chase.stride = value.value("stride", chase.stride);
  chase.seed = value.value("seed", chase.seed);
  return chase;
}

json bench_to_json(const codegen::BenchInfo& info) {
  json j = {
      {"id", info.id},
      {"file", info.file_name()},
      {"kind", codegen::to_string(info.kind)},
      {"timed_count", info.timed_count},
      {"divisor", info.divisor},
      {"clock_width", codegen::to_string(info.clock_width)},
      {"timed_op", info.timed_op},
  };
  if (const auto* spec = info.instruction()) j["signature"] = spec->signature();
  if (const auto* level = info.memory_level()) j["level"] = to_string(*level);
  if (const auto* op = info.tensor_op()) j["tensor_op"] = tensor_op_to_json(*op);
  if (info.chase) j["chase"] = chase_to_json(*info.chase);
  if (info.iters) j["iters"] = info.iters;
  if (info.subtract_followup) j["subtract_followup"] = true;
  return j;
}

codegen::BenchInfo bench_from_json(const json& value) {
  codegen::BenchInfo info;
  info.id = require_string(value, "id");
  info.kind = parse_enum<codegen::BenchKind>(value, "kind", codegen::parse_bench_kind);
  info.timed_count = require_uint<std::uint64_t>(value, "timed_count");
  info.divisor = require_uint<std::uint64_t>(value, "divisor");
  if (info.divisor == 0) throw ParseError(fmt::format("benchmark '{}' has divisor 0", info.id), "divisor");
  info.clock_width = parse_enum<codegen::ClockWidth>(value, "clock_width", codegen::parse_clock_width);
  info.timed_op = value.value("timed_op", "");
  if (value.contains("signature")) info.target = parse_signature(require_string(value, "signature"));
  if (value.contains("level")) info.target = parse_enum<MemoryLevel>(value, "level", parse_memory_level);
  if (value.contains("tensor_op")) info.target = tensor_op_from_json(value.at("tensor_op"));
  if (value.contains("chase")) info.chase = chase_from_json(value.at("chase"));
  info.iters = value.value("iters", 0u);
  info.subtract_followup = value.value("subtract_followup", false);
  return info;
}

}  // namespace ptxlat::detail
