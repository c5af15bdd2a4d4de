// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// JSON conversions shared by the manifest, results and table files.

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "ptxlat/codegen.hpp"
#include "ptxlat/isa_model.hpp"

namespace ptxlat::detail {

using nlohmann::json;

// Cycles are written as integers when integral, otherwise as "p/q".
json cycles_to_json(const Cycles& value);
Cycles cycles_from_json(const json& value, std::string_view field);

json tensor_op_to_json(const TensorCoreOp& op);
TensorCoreOp tensor_op_from_json(const json& value);

json chase_to_json(const codegen::PointerChaseConfig& chase);
codegen::PointerChaseConfig chase_from_json(const json& value);

json bench_to_json(const codegen::BenchInfo& info);
codegen::BenchInfo bench_from_json(const json& value);

// Typed field access; throws ParseError naming the field.
const json& require(const json& object, std::string_view field);
std::string require_string(const json& object, std::string_view field);

// Parses text, converting nlohmann's exception into ParseError with line and
// column.
json parse_json_text(std::string_view text, std::string_view what);

}  // namespace ptxlat::detail
