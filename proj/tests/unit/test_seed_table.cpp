// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// The built-in reference table checked against values transcribed
// independently from the published measurements.

#include <set>

#include <gtest/gtest.h>

#include "ptxlat/isa_model.hpp"

namespace ptxlat {
namespace {

struct InstructionRow {
  const char* ptx;
  const char* sass;
  int min;
  int max;
};

// A spread of instruction rows, including ranged and multi-instruction ones.
constexpr InstructionRow kInstructionRows[] = {
    {"add.u16", "UIADD3", 2, 2},
    {"addc.u32", "IADD3.X", 2, 2},
    {"add.u32", "IADD", 2, 2},
    {"add.u64", "UIADD3.X+UIADD3", 4, 4},
    {"add.f64", "DADD", 4, 4},
    {"mul.wide.u32", "IMAD", 4, 4},
    {"mul24.hi.u32", "UPRMT+USHF.R.U32.HI+IMAD.U32+PRMT", 9, 9},
    {"mad.lo.u32", "FFMA", 2, 2},
    {"mad.lo.u64", "IMAD", 2, 2},
    {"mad24.hi.u32", "USHF.R.U32.HI+UIMAD.WIDE.U32+2*UPRMT+IADD3", 11, 11},
    {"min.u64", "UISETP.LT.U32.AND+2*USEL", 8, 8},
    {"min.s64", "UISETP.LT.U32.AND+UISETP.LT.AND.EX+2*USEL", 8, 8},
    {"min.f64", "DSETP.MIN.AND+IMAD.MOV.U32+UMOV+FSEL", 10, 10},
    {"neg.s32", "IADD3", 2, 2},
    {"neg.f32", "FADD | IMAD.MOV.U32", 2, 2},
    {"fma.rn.f64", "DFMA", 4, 4},
    {"sqrt.rn.f32", "multiple(MUFU.RSQ)", 190, 235},
    {"sqrt.approx.f32", "multiple(MUFU.SQRT)", 2, 18},
    {"sqrt.rn.f64", "multiple(MUFU.RSQ64)", 260, 340},
    {"rsqrt.approx.f32", "multiple(MUFU.RSQ)", 2, 18},
};

TEST(SeedTable, InstructionRows) {
  const auto table = seed_paper_table();
  for (const auto& row : kInstructionRows) {
    const auto* r = table.find(row.ptx);
    ASSERT_NE(r, nullptr) << row.ptx;
    EXPECT_EQ(r->mapping.notation(), row.sass) << row.ptx;
    EXPECT_EQ(r->cycles_min, row.min) << row.ptx;
    EXPECT_EQ(r->cycles_max, row.max) << row.ptx;
    EXPECT_EQ(r->source, Source::paper_seed);
  }
}

TEST(SeedTable, ApproximateRowsAreFlagged) {
  const auto table = seed_paper_table();
  ASSERT_NE(table.find("neg.s64"), nullptr);
  EXPECT_TRUE(table.find("neg.s64")->approximate);
  EXPECT_EQ(table.find("neg.s64")->cycles_min, 10);
  EXPECT_FALSE(table.find("add.u32")->approximate);
}

TEST(SeedTable, RecordsSatisfyInvariants) {
  const auto table = seed_paper_table();
  std::set<std::string> seen;
  for (const auto& r : table.records()) {
    EXPECT_NO_THROW(r.validate()) << r.signature;
    EXPECT_TRUE(seen.insert(r.signature).second) << r.signature;
    EXPECT_EQ(parse_signature(r.signature).key(), r.signature);
  }
}

TEST(SeedTable, LaunchCurve) {
  const std::map<std::uint32_t, Cycles> expected = {{1, 5}, {2, 3}, {3, 2}, {4, 2}};
  EXPECT_EQ(reference_launch_curve(), expected);
}

TEST(SeedTable, DependencyPairs) {
  struct Pair {
    const char* ptx;
    int dependent;
    int independent;
  };
  constexpr Pair kPairs[] = {
      {"add.f16", 3, 2}, {"add.u32", 4, 2}, {"add.f64", 5, 4}, {"mul.lo.u32", 3, 2}, {"mad.rn.f32", 4, 2},
  };
  auto pairs = reference_dependency_pairs();
  ASSERT_EQ(pairs.size(), std::size(kPairs));
  const auto table = seed_paper_table();
  for (const auto& p : kPairs) {
    auto it = std::find_if(pairs.begin(), pairs.end(), [&](const DependencyPair& d) { return d.ptx_name == p.ptx; });
    ASSERT_NE(it, pairs.end()) << p.ptx;
    EXPECT_EQ(it->dependent, p.dependent);
    EXPECT_EQ(it->independent, p.independent);
    const auto* dep = table.find(std::string(p.ptx) + ":dep");
    ASSERT_NE(dep, nullptr) << p.ptx;
    EXPECT_EQ(dep->cycles_min, p.dependent);
  }
  // The dependent add.u32 chain may lower to either form.
  EXPECT_EQ(table.find("add.u32:dep")->mapping.notation(), "IADD3 | IMAD.IADD");
}

TEST(SeedTable, MemoryLatencies) {
  const auto table = seed_paper_table();
  EXPECT_EQ(table.memory_cycles(MemoryLevel::global), Cycles(290));
  EXPECT_EQ(table.memory_cycles(MemoryLevel::l2), Cycles(200));
  EXPECT_TRUE(table.memory().at(MemoryLevel::l2).approximate);
  EXPECT_EQ(table.memory_cycles(MemoryLevel::l1), Cycles(33));
  EXPECT_EQ(table.memory_cycles(MemoryLevel::shared_load), Cycles(23));
  EXPECT_EQ(table.memory_cycles(MemoryLevel::shared_store), Cycles(19));
  EXPECT_EQ(table.clock_overhead(), 2);
}

TEST(SeedTable, TensorOps) {
  struct Row {
    const char* sig;
    const char* sass;
    int count;
    int per;
    int cycles;
    double measured;
    double theoretical;
  };
  constexpr Row kRows[] = {
      {"m16n16k16.f16.f16", "HMMA.16816.F16", 2, 8, 16, 311, 312},
      {"m16n16k16.f16.f32", "HMMA.16816.F32", 2, 8, 16, 310, 312},
      {"m16n16k16.bf16.f32", "HMMA.16816.F32.BF16", 2, 8, 16, 310, 312},
      {"m16n16k8.tf32.f32", "HMMA.1684.F32.TF32", 4, 4, 16, 132, 156},
      {"m8n8k4.f64.f64", "DMMA.884", 1, 16, 16, 19, 19.5},
      {"m16n16k16.u8.u32", "IMMA.16816.U8.U8", 2, 4, 8, 594, 624},
      {"m8n8k32.u4.u32", "IMMA.8832.U4.U4", 1, 4, 4, 1229, 1248},
  };
  const auto table = seed_paper_table();
  ASSERT_EQ(table.tensor_ops().size(), std::size(kRows));
  for (const auto& row : kRows) {
    const auto* op = table.find_tensor_op(row.sig);
    ASSERT_NE(op, nullptr) << row.sig;
    EXPECT_EQ(op->sass_opcode, row.sass);
    EXPECT_EQ(op->sass_count, row.count);
    EXPECT_EQ(op->per_sass_cycles, row.per);
    EXPECT_EQ(op->total_cycles(), row.cycles);
    EXPECT_DOUBLE_EQ(op->measured_throughput.value(), row.measured);
    EXPECT_DOUBLE_EQ(op->theoretical_throughput.value(), row.theoretical);
    EXPECT_TRUE(is_supported_tensor_shape(op->shape, op->in_type, op->acc_type));
  }
  EXPECT_EQ(table.find_tensor_op("m8n8k32.u4.u32")->layout_b, Layout::col);
}

}  // namespace
}  // namespace ptxlat
