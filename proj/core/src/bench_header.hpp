// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// The "//@bench key=value ..." line at the top of every generated kernel.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ptxlat::detail {

inline constexpr std::string_view kBenchHeaderTag = "//@bench";

struct BenchHeader {
  std::size_t line = 0;
  std::map<std::string, std::string, std::less<>> fields;

  std::optional<std::string_view> get(std::string_view key) const {
    auto it = fields.find(key);
    if (it == fields.end()) return std::nullopt;
    return std::string_view(it->second);
  }
};

// Finds the first header line in the text; nullopt when absent.
std::optional<BenchHeader> find_bench_header(std::string_view text);

}  // namespace ptxlat::detail
