// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ptxlat/codegen.hpp"
#include "test_support.hpp"

namespace ptxlat::codegen {
namespace {

std::string replace_once(std::string text, std::string_view what, std::string_view with) {
  auto pos = text.find(what);
  EXPECT_NE(pos, std::string::npos) << what;
  if (pos != std::string::npos) text.replace(pos, what.size(), with);
  return text;
}

void expect_valid(const Microbenchmark& b) {
  auto r = validate_ptx(b.source_text);
  EXPECT_TRUE(r.valid) << b.info.id << "\n" << r.summary();
  ASSERT_TRUE(r.timed_count) << b.info.id;
  EXPECT_EQ(*r.timed_count, b.info.timed_count) << b.info.id;
}

TEST(Validator, EveryGeneratedKernelPasses) {
  const auto table = seed_paper_table();
  for (const auto& r : table.records()) expect_valid(gen_alu(parse_signature(r.signature)));
  for (const auto& r : table.records()) {
    auto spec = parse_signature(r.signature);
    if (spec.dependency == Dependency::independent && supports_dependent_chain(spec)) {
      spec.dependency = Dependency::dependent;
      expect_valid(gen_alu(spec));
    }
  }
  for (auto width : {ClockWidth::bits64, ClockWidth::bits32}) {
    expect_valid(gen_clock_overhead(width));
    expect_valid(gen_alu(parse_signature("add.u32"), width));
    for (auto level : {MemoryLevel::global, MemoryLevel::l2, MemoryLevel::l1}) {
      expect_valid(gen_memory(level, default_chase(level), {}, width));
    }
    expect_valid(gen_shared(SharedDirection::load, width));
    expect_valid(gen_shared(SharedDirection::store, width));
    for (const auto& op : table.tensor_ops()) {
      expect_valid(gen_wmma(op, kDefaultWmmaIters, width));
      expect_valid(gen_wmma(op, 3, width));
    }
  }
}

TEST(Validator, FigureListings) {
  struct Case {
    const char* file;
    std::uint64_t timed;
  };
  for (const auto& c : {Case{"add_u32_listing.ptx", 3}, Case{"global_chase_listing.ptx", 256},
                        Case{"shared_load_listing.ptx", 1}, Case{"shared_store_listing.ptx", 1}}) {
    auto r = validate_ptx(testing::read_file(testing::data_dir() / c.file));
    EXPECT_TRUE(r.valid) << c.file << "\n" << r.summary();
    EXPECT_EQ(r.timed_count, c.timed) << c.file;
  }
}

TEST(Validator, ReportsStructuralProblems) {
  const auto base = gen_alu(parse_signature("add.u32")).source_text;

  auto r = validate_ptx(replace_once(base, "mov.u64 \t%rd4, %clock64;", "mov.u64 \t%rd4, 0;"));
  EXPECT_FALSE(r.valid);
  ASSERT_FALSE(r.issues.empty());
  EXPECT_NE(r.issues[0].message.find("only one clock read"), std::string::npos);

  r = validate_ptx(replace_once(base, "add.u32 \t%r3", "frob.u32 \t%r3"));
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.issues.at(0).token, "frob");

  r = validate_ptx(replace_once(base, "timed-count=3", "timed-count=4"));
  EXPECT_FALSE(r.valid);

  r = validate_ptx(replace_once(base, "st.global.u64 \t[%rd2], %rd5;", ""));
  EXPECT_FALSE(r.valid);

  r = validate_ptx(replace_once(base, "%r3, %r1, %r2", "%r3, %r1, %r9"));
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.issues.at(0).token, "%r9");

  auto extra_clock = replace_once(base, "sub.s64", "mov.u64 \t%rd1, %clock64;\n\tsub.s64");
  EXPECT_FALSE(validate_ptx(extra_clock).valid);
  EXPECT_FALSE(validate_ptx("").valid);
}

TEST(Validator, WmmaDescriptorCountsMmaCalls) {
  auto b = gen_wmma(seed_paper_table().tensor_ops().front(), 8);
  auto r = validate_ptx(b.source_text);
  EXPECT_TRUE(r.wmma_descriptor);
  EXPECT_TRUE(r.valid);
  auto bad = validate_ptx(replace_once(b.source_text, "i < 8;", "i < 9;"));
  EXPECT_FALSE(bad.valid);
}

TEST(Validator, NeverThrows) {
  for (std::string text : {"garbage", "{", ".visible .entry x(", "//@bench kind=wmma\n", "\n\n\n"}) {
    EXPECT_NO_THROW(validate_ptx(text));
    EXPECT_FALSE(validate_ptx(text).valid) << text;
  }
}

}  // namespace
}  // namespace ptxlat::codegen
