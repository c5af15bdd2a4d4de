// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Structural checks for the CUDA-like WMMA benchmark sources. These are not
// compiled here, so the checks are line-oriented: fragment declarations,
// loads before the window, one unrolled loop of mma_sync calls inside it,
// stores and the delta write after it.

#include <regex>

#include <fmt/format.h>

#include "bench_header.hpp"
#include "strings.hpp"
#include "validator_internal.hpp"

namespace ptxlat::codegen::detail {

namespace {

using ptxlat::detail::split;
using ptxlat::detail::trim;

constexpr std::size_t kSets = 4;

std::size_t count_names(std::string_view decl) {
  auto close = decl.rfind('>');
  if (close == std::string_view::npos) return 0;
  auto names = trim(decl.substr(close + 1));
  if (names.ends_with(';')) names.remove_suffix(1);
  std::size_t n = 0;
  for (auto piece : split(names, ',')) {
    if (!trim(piece).empty()) ++n;
  }
  return n;
}

}  // namespace

ValidationReport validate_wmma_source(std::string_view text) {
  ValidationReport report;
  report.wmma_descriptor = true;
  report.timed_op = "wmma::mma_sync";
  if (auto header = ptxlat::detail::find_bench_header(text)) {
    if (auto n = header->get("timed-count")) {
      if (auto v = ptxlat::detail::parse_int<std::uint64_t>(*n)) report.declared_timed_count = *v;
    }
  }

  static const std::regex kClock(R"(\bclock(64)?\s*\(\s*\))");
  static const std::regex kLoop(R"(^for\s*\(\s*int\s+(\w+)\s*=\s*0\s*;\s*\1\s*<\s*(\d+)\s*;\s*(\1\+\+|\+\+\1)\s*\)\s*\{$)");

  struct Line {
    std::size_t number;
    std::string_view text;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  for (auto raw : split(text, '\n')) {
    ++number;
    auto t = trim(raw);
    if (auto c = t.find("//"); c != std::string_view::npos) t = trim(t.substr(0, c));
    if (!t.empty()) lines.push_back({number, t});
  }

  std::vector<std::size_t> clocks;
  std::size_t frag_a = 0, frag_b = 0, frag_c = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line(lines[i].text);
    if (std::regex_search(line, kClock)) clocks.push_back(i);
    if (line.starts_with("wmma::fragment<wmma::matrix_a")) frag_a += count_names(lines[i].text);
    if (line.starts_with("wmma::fragment<wmma::matrix_b")) frag_b += count_names(lines[i].text);
    if (line.starts_with("wmma::fragment<wmma::accumulator")) frag_c += count_names(lines[i].text);
    if (lines[i].text.ends_with(';')) ++report.instruction_count;
  }

  if (clocks.empty()) {
    add_issue(report, 1, "clock64()", "no timed region: the kernel never reads the clock");
    return report;
  }
  if (clocks.size() == 1) {
    add_issue(report, lines[clocks[0]].number, std::string(lines[clocks[0]].text),
              "unterminated timed region: only one clock read");
    return report;
  }
  if (clocks.size() > 2) {
    add_issue(report, lines[clocks[2]].number, std::string(lines[clocks[2]].text),
              fmt::format("expected exactly two clock reads, found {}", clocks.size()));
    return report;
  }
  const std::size_t open = clocks[0];
  const std::size_t close = clocks[1];

  for (auto [count, name] : {std::pair{frag_a, "matrix_a"}, std::pair{frag_b, "matrix_b"},
                             std::pair{frag_c, "accumulator"}}) {
    if (count != kSets) {
      add_issue(report, lines[open].number, name,
                fmt::format("expected {} {} fragments, found {}", kSets, name, count));
    }
  }

  std::size_t loads = 0;
  for (std::size_t i = 0; i < open; ++i) {
    if (lines[i].text.find("wmma::load_matrix_sync(") != std::string_view::npos) ++loads;
  }
  if (loads < 3 * kSets) {
    add_issue(report, lines[open].number, "wmma::load_matrix_sync",
              fmt::format("expected {} fragment loads before the timed region, found {}", 3 * kSets, loads));
  }

  // Timed region: one counted loop holding the mma_sync calls.
  std::uint64_t iterations = 1;
  std::size_t in_loop = 0;
  std::size_t outside_loop = 0;
  bool in_body = false;
  bool seen_loop = false;
  for (std::size_t i = open + 1; i < close; ++i) {
    const std::string line(lines[i].text);
    std::smatch m;
    if (std::regex_match(line, m, kLoop)) {
      if (seen_loop) {
        add_issue(report, lines[i].number, line, "only one loop is allowed in the timed region");
        continue;
      }
      seen_loop = true;
      in_body = true;
      iterations = std::stoull(m[2].str());
      continue;
    }
    if (line == "}") {
      in_body = false;
      continue;
    }
    if (lines[i].text.ends_with(';')) ++report.inside_window;
    if (line.find("wmma::mma_sync(") == std::string::npos) continue;
    (in_body ? in_loop : outside_loop) += 1;
  }
  if (in_body) add_issue(report, lines[close].number, "}", "loop in the timed region is not closed");
  if (seen_loop && in_loop != kSets) {
    add_issue(report, lines[open].number, "wmma::mma_sync",
              fmt::format("expected {} mma_sync calls per iteration, found {}", kSets, in_loop));
  }
  if (!seen_loop && outside_loop == 0) {
    add_issue(report, lines[open].number, "wmma::mma_sync", "the timed region holds no mma_sync call");
  }
  report.outside_window = report.instruction_count - report.inside_window - 2;

  std::size_t stores = 0;
  bool delta = false;
  for (std::size_t i = close + 1; i < lines.size(); ++i) {
    if (lines[i].text.find("wmma::store_matrix_sync(") != std::string_view::npos) ++stores;
    if (lines[i].text.find("end_time - start_time") != std::string_view::npos) delta = true;
  }
  if (stores == 0) {
    add_issue(report, lines[close].number, "wmma::store_matrix_sync",
              "accumulators are never stored; the compiler may remove the timed region");
  }
  if (!delta) add_issue(report, lines[close].number, "end_time", "clock delta is never stored");

  report.timed_count = iterations * in_loop + outside_loop;
  if (report.declared_timed_count && *report.declared_timed_count != *report.timed_count) {
    add_issue(report, lines[open].number, report.timed_op,
              fmt::format("header declares timed-count {} but the timed region executes {} mma_sync call(s)",
                          *report.declared_timed_count, *report.timed_count));
  }
  return report;
}

}  // namespace ptxlat::codegen::detail
