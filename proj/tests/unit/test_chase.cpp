// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/error.hpp"

namespace ptxlat::codegen {
namespace {

// Walks from element 0 and reports the number of distinct elements visited
// before returning to 0, or 0 when the walk revisits another element first.
std::uint64_t cycle_length(const std::vector<std::uint64_t>& next) {
  std::vector<bool> seen(next.size(), false);
  std::uint64_t at = 0;
  std::uint64_t visited = 0;
  do {
    if (at >= next.size() || seen[at]) return 0;
    seen[at] = true;
    ++visited;
    at = next[at];
  } while (at != 0);
  return visited;
}

TEST(Chase, RandomConfigsFormOneFullCycle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    PointerChaseConfig cfg;
    cfg.element_count = 4 * (1 + rng() % 1024);  // 4..4096
    cfg.seed = rng();
    auto next = build_chase(cfg);
    ASSERT_EQ(next.size(), cfg.element_count);
    EXPECT_EQ(cycle_length(next), cfg.element_count) << "count " << cfg.element_count << " seed " << cfg.seed;
  }
}

TEST(Chase, StridedLayout) {
  PointerChaseConfig cfg;
  cfg.layout = ChaseLayout::strided;
  cfg.element_count = 64;
  cfg.stride = 5;
  auto next = build_chase(cfg);
  for (std::uint64_t i = 0; i < cfg.element_count; ++i) EXPECT_EQ(next[i], (i + 5) % 64);
  EXPECT_EQ(cycle_length(next), 64u);

  cfg.stride = 4;  // shares a factor with 64
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Chase, DeterministicPerSeed) {
  PointerChaseConfig cfg;
  cfg.element_count = 512;
  EXPECT_EQ(build_chase(cfg), build_chase(cfg));
  auto other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(build_chase(cfg), build_chase(other));
}

TEST(Chase, ConfigValidation) {
  PointerChaseConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.element_count = 6;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.element_count = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.element_count = 8;
  cfg.unroll = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.unroll = kChaseUnroll;
  cfg.element_bytes = 4;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(PointerChaseConfig{}.footprint_bytes(), 1024u * 8u);
}

}  // namespace
}  // namespace ptxlat::codegen
