// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "ptxlat/codegen.hpp"

namespace ptxlat::codegen::detail {

ValidationReport validate_wmma_source(std::string_view text);

void add_issue(ValidationReport& report, std::size_t line, std::string token, std::string message);

}  // namespace ptxlat::codegen::detail
