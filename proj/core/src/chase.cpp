// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/error.hpp"

namespace ptxlat::codegen {

namespace {

// Uniform integer in [0, bound) by rejection. std::uniform_int_distribution
// is implementation-defined, which would make chains differ between
// standard libraries for the same seed.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace

void PointerChaseConfig::validate() const {
  if (unroll != kChaseUnroll) {
    throw ConfigError(fmt::format("chase unroll must be {} (got {})", kChaseUnroll, unroll));
  }
  if (element_bytes != 8) {
    throw ConfigError(fmt::format("chase elements hold 64-bit addresses; element_bytes must be 8 (got {})",
                                  element_bytes));
  }
  if (element_count == 0 || element_count % unroll != 0) {
    throw ConfigError(fmt::format("element_count must be a positive multiple of {} (got {})", unroll,
                                  element_count));
  }
  if (layout == ChaseLayout::strided) {
    if (stride == 0 || stride >= element_count || std::gcd(stride, element_count) != 1) {
      throw ConfigError(fmt::format("stride {} must be in [1, {}) and coprime with the element count", stride,
                                    element_count));
    }
  }
}

std::vector<std::uint64_t> build_chase(const PointerChaseConfig& config) {
  config.validate();
  const std::uint64_t n = config.element_count;
  std::vector<std::uint64_t> next(n);
  if (config.layout == ChaseLayout::strided) {
    for (std::uint64_t i = 0; i < n; ++i) next[i] = (i + config.stride) % n;
    return next;
  }
  // Sattolo's algorithm: a uniformly random permutation with a single cycle.
  std::iota(next.begin(), next.end(), std::uint64_t{0});
  std::mt19937_64 rng(config.seed);
  for (std::uint64_t i = n - 1; i > 0; --i) {
    std::swap(next[i], next[bounded(rng, i)]);
  }
  return next;
}

}  // namespace ptxlat::codegen
