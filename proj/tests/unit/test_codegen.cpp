// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/error.hpp"
#include "test_support.hpp"

namespace ptxlat::codegen {
namespace {

std::vector<Microbenchmark> every_kernel() {
  const auto table = seed_paper_table();
  std::vector<Microbenchmark> out;
  out.push_back(gen_clock_overhead());
  out.push_back(gen_clock_overhead(ClockWidth::bits32));
  for (const auto& r : table.records()) out.push_back(gen_alu(parse_signature(r.signature)));
  out.push_back(gen_alu(parse_signature("add.u32"), ClockWidth::bits32));
  for (std::uint32_t n = 1; n <= 4; ++n) out.push_back(gen_alu(parse_signature(fmt::format("add.u32x{}", n))));
  for (auto level : {MemoryLevel::l2, MemoryLevel::l1}) out.push_back(gen_memory(level, default_chase(level)));
  out.push_back(gen_shared(SharedDirection::load));
  out.push_back(gen_shared(SharedDirection::store));
  for (const auto& op : table.tensor_ops()) out.push_back(gen_wmma(op, kDefaultWmmaIters));
  return out;
}

TEST(Codegen, AluBenchmarkMetadata) {
  auto b = gen_alu(parse_signature("add.u32"));
  EXPECT_EQ(b.info.id, "add.u32.alu");
  EXPECT_EQ(b.info.kind, BenchKind::alu);
  EXPECT_EQ(b.info.timed_count, 3u);
  EXPECT_EQ(b.info.divisor, 3u);
  EXPECT_EQ(b.info.timed_op, "add.u32");
  EXPECT_EQ(b.info.file_name(), "add.u32.alu.ptx");
  EXPECT_EQ(b.info.clock_width, ClockWidth::bits64);
  EXPECT_NE(b.source_text.find("%clock64"), std::string::npos);
}

TEST(Codegen, ThirtyTwoBitClockVariant) {
  auto b = gen_alu(parse_signature("add.u32"), ClockWidth::bits32);
  EXPECT_EQ(b.info.id, "add.u32.alu-clk32");
  EXPECT_NE(b.source_text.find("%clock;"), std::string::npos);
  EXPECT_EQ(b.source_text.find("%clock64"), std::string::npos);
}

TEST(Codegen, DependentChainFeedsEachInstruction) {
  auto b = gen_alu(parse_signature("add.u32:dep"));
  EXPECT_EQ(b.info.id, "add.u32:dep.alu");
  // Every timed add reads the previous result.
  std::size_t chained = 0;
  for (std::size_t pos = 0; (pos = b.source_text.find("add.u32 \t%r1, %r1,", pos)) != std::string::npos; ++pos) ++chained;
  EXPECT_EQ(chained, 3u);
  EXPECT_THROW(gen_alu(parse_signature("setp.ne.s32:dep")), GenerationError);
  EXPECT_FALSE(supports_dependent_chain(parse_signature("setp.ne.s32")));
  EXPECT_TRUE(supports_dependent_chain(parse_signature("fma.rn.f32")));
}

TEST(Codegen, UnsupportedOpcodeListsSupportedSet) {
  InstructionSpec spec;
  spec.opcode = "frob";
  try {
    gen_alu(spec);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("add"), std::string::npos);
  }
  spec = parse_signature("add.u32");
  spec.count = 0;
  EXPECT_THROW(gen_alu(spec), GenerationError);
}

TEST(Codegen, InventoryIsGeneratable) {
  const auto table = seed_paper_table();
  for (const auto& r : table.records()) {
    EXPECT_NO_THROW(gen_alu(parse_signature(r.signature))) << r.signature;
  }
}

TEST(Codegen, ClockOverheadHasEmptyRegion) {
  auto b = gen_clock_overhead();
  EXPECT_EQ(b.info.kind, BenchKind::clock_overhead);
  EXPECT_EQ(b.info.timed_count, 0u);
  auto report = validate_ptx(b.source_text);
  EXPECT_TRUE(report.valid) << report.summary();
  EXPECT_EQ(report.inside_window, 0u);
}

TEST(Codegen, MemorySizingRule) {
  const DeviceCapacities caps;
  auto l1 = default_chase(MemoryLevel::l1, caps);
  EXPECT_EQ(l1.cache_op, CacheOp::ca);
  EXPECT_NO_THROW(gen_memory(MemoryLevel::l1, l1, caps));

  // Wrong cache operator for the level.
  auto wrong = l1;
  wrong.cache_op = CacheOp::cg;
  EXPECT_THROW(gen_memory(MemoryLevel::l1, wrong, caps), ConfigError);

  // An L1 chase that does not fit in L1.
  auto big = l1;
  big.element_count = caps.l1_bytes / 8;
  EXPECT_THROW(gen_memory(MemoryLevel::l1, big, caps), ConfigError);

  // A global chase that fits in L2.
  auto small = default_chase(MemoryLevel::global, caps);
  small.element_count = 1024;
  EXPECT_THROW(gen_memory(MemoryLevel::global, small, caps), ConfigError);

  EXPECT_THROW(gen_memory(MemoryLevel::shared_load, l1, caps), ConfigError);
}

TEST(Codegen, DefaultGlobalChaseJustExceedsL2) {
  for (std::uint64_t l2 : {std::uint64_t{4096}, std::uint64_t{40} << 20, std::uint64_t{6} << 20}) {
    DeviceCapacities caps{1024, l2};
    auto chase = default_chase(MemoryLevel::global, caps);
    // Smallest multiple of four elements whose byte size exceeds L2.
    std::uint64_t n = 4;
    while (n * 8 <= l2) n += 4;
    EXPECT_EQ(chase.element_count, n) << l2;
    EXPECT_EQ(chase.cache_op, CacheOp::cv);
    EXPECT_NO_THROW(gen_memory(MemoryLevel::global, chase, caps));
  }
}

TEST(Codegen, MemoryBenchmarkMetadata) {
  auto b = gen_memory(MemoryLevel::l2, default_chase(MemoryLevel::l2));
  EXPECT_EQ(b.info.id, "l2.memory");
  EXPECT_EQ(b.info.timed_count, 1024u);
  EXPECT_EQ(b.info.divisor, 1024u);
  EXPECT_EQ(b.info.timed_op, "ld.global.cg.u64");
  ASSERT_TRUE(b.info.chase);
  EXPECT_EQ(b.info.chase->element_count, 1024u);
}

TEST(Codegen, SharedBenchmarks) {
  auto ld = gen_shared(SharedDirection::load);
  auto st = gen_shared(SharedDirection::store);
  EXPECT_EQ(ld.info.id, "shared_load.shared");
  EXPECT_EQ(st.info.id, "shared_store.shared");
  EXPECT_EQ(ld.info.timed_op, "ld.shared.u64");
  EXPECT_EQ(st.info.timed_op, "st.shared.u64");
  EXPECT_TRUE(ld.info.subtract_followup);
  EXPECT_EQ(*ld.info.memory_level(), MemoryLevel::shared_load);
}

TEST(Codegen, WmmaBenchmarks) {
  const auto table = seed_paper_table();
  const auto& op = table.tensor_ops().front();
  auto b = gen_wmma(op, kDefaultWmmaIters);
  EXPECT_EQ(b.info.id, "m16n16k16.f16.f16.wmma");
  EXPECT_EQ(b.info.timed_count, 4u * kDefaultWmmaIters);
  EXPECT_EQ(b.info.divisor, b.info.timed_count);
  EXPECT_EQ(b.info.file_name(), "m16n16k16.f16.f16.wmma.cu");
  EXPECT_EQ(gen_wmma(op, 8).info.id, "m16n16k16.f16.f16x8.wmma");
  EXPECT_THROW(gen_wmma(op, 0), GenerationError);

  auto bad = op;
  bad.shape = {8, 8, 4};
  EXPECT_THROW(gen_wmma(bad, 4), GenerationError);
}

TEST(Codegen, TensorOpForRetargetsShape) {
  const auto table = seed_paper_table();
  auto op = tensor_op_for("m32n8k16.f16.f16", table);
  EXPECT_EQ(op.shape, (TensorShape{32, 8, 16}));
  EXPECT_EQ(op.sass_opcode, "HMMA.16816.F16");
  EXPECT_THROW(tensor_op_for("m8n8k4.f16.f16", table), Error);
}

TEST(Codegen, BenchFromIdRebuildsEveryKernel) {
  const auto table = seed_paper_table();
  for (const auto& b : every_kernel()) {
    EXPECT_EQ(bench_from_id(b.info.id, table), b.info) << b.info.id;
    EXPECT_EQ(regenerate(b.info).source_text, b.source_text) << b.info.id;
  }
  EXPECT_THROW(bench_from_id("add.u32", table), ParseError);
  EXPECT_THROW(bench_from_id("add.u32.bogus", table), ParseError);
}

TEST(Codegen, GenerationIsDeterministic) {
  auto a = every_kernel();
  auto b = every_kernel();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].source_text, b[i].source_text);
}

TEST(Manifest, RoundTripAndMerge) {
  Manifest m;
  m.capacities = {64 * 1024, 1 << 20};
  for (const auto& b : every_kernel()) m.put(b.info);
  auto text = manifest_to_text(m);
  EXPECT_EQ(manifest_from_text(text), m);
  EXPECT_EQ(manifest_to_text(manifest_from_text(text)), text);

  auto size = m.benchmarks.size();
  m.put(gen_alu(parse_signature("add.u32")).info);
  EXPECT_EQ(m.benchmarks.size(), size);
  ASSERT_NE(m.find("add.u32.alu"), nullptr);
  EXPECT_EQ(m.find("nothing"), nullptr);

  testing::TempDir dir;
  write_manifest(m, dir / "manifest.json");
  EXPECT_EQ(read_manifest(dir / "manifest.json"), m);
}

TEST(Manifest, RejectsMalformed) {
  EXPECT_THROW(manifest_from_text("{"), ParseError);
  EXPECT_THROW(manifest_from_text(R"({"benchmarks": [{"id": "x"}]})"), Error);
}

TEST(Codegen, WriteKernel) {
  testing::TempDir dir;
  auto b = gen_alu(parse_signature("add.u32"));
  auto path = write_kernel(b, dir.path());
  EXPECT_EQ(path.filename(), "add.u32.alu.ptx");
  EXPECT_EQ(testing::read_file(path), b.source_text);
}

}  // namespace
}  // namespace ptxlat::codegen
