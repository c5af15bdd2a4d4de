// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ptxlat/error.hpp"
#include "ptxlat/isa_model.hpp"

namespace ptxlat {
namespace {

TEST(Cycles, FormatAndParse) {
  EXPECT_EQ(format_cycles(Cycles(2)), "2");
  EXPECT_EQ(format_cycles(Cycles(7, 3)), "7/3");
  EXPECT_EQ(format_cycles(Cycles(-1, 2)), "-1/2");
  EXPECT_EQ(parse_cycles("7/3"), Cycles(7, 3));
  EXPECT_EQ(parse_cycles("14/6"), Cycles(7, 3));
  EXPECT_THROW(parse_cycles("x"), ParseError);
  EXPECT_THROW(parse_cycles("1/0"), ParseError);
}

// Mixed rational/integer equality must terminate under C++20 rewriting.
TEST(Cycles, IntegerComparisonTerminates) {
  const Cycles sixteen(16);
  EXPECT_TRUE(sixteen == 16);
  EXPECT_FALSE(sixteen != 16);
  EXPECT_TRUE(sixteen != 0);
  EXPECT_TRUE(0 != sixteen);
  EXPECT_FALSE(Cycles(1, 2) == 0);
  EXPECT_TRUE(Cycles(0) == 0L);
}

TEST(DataType, RoundTrip) {
  for (auto t : kAllDataTypes) {
    auto parsed = parse_data_type(to_string(t));
    ASSERT_TRUE(parsed) << to_string(t);
    EXPECT_EQ(*parsed, t);
  }
  EXPECT_FALSE(parse_data_type("q32"));
  EXPECT_FALSE(parse_data_type(""));
}

TEST(DataType, BitWidths) {
  EXPECT_EQ(bit_width(DataType::u4), 4);
  EXPECT_EQ(bit_width(DataType::u8), 8);
  EXPECT_EQ(bit_width(DataType::f16), 16);
  EXPECT_EQ(bit_width(DataType::bf16), 16);
  EXPECT_EQ(bit_width(DataType::tf32), 32);
  EXPECT_EQ(bit_width(DataType::s64), 64);
  EXPECT_EQ(bit_width(DataType::f64), 64);
}

TEST(DataType, NarrowerThanIsStrictTotalOrder) {
  for (auto a : kAllDataTypes) {
    EXPECT_FALSE(narrower_than(a, a));
    for (auto b : kAllDataTypes) {
      if (a != b) EXPECT_NE(narrower_than(a, b), narrower_than(b, a));
      if (bit_width(a) < bit_width(b)) EXPECT_TRUE(narrower_than(a, b));
      for (auto c : kAllDataTypes) {
        if (narrower_than(a, b) && narrower_than(b, c)) EXPECT_TRUE(narrower_than(a, c));
      }
    }
  }
}

TEST(DataType, Classes) {
  EXPECT_TRUE(is_float(DataType::f16));
  EXPECT_TRUE(is_float(DataType::tf32));
  EXPECT_FALSE(is_float(DataType::u32));
  EXPECT_TRUE(is_signed_int(DataType::s32));
  EXPECT_FALSE(is_signed_int(DataType::u32));
}

TEST(Signature, ParsesParts) {
  auto s = parse_signature("mad.lo.u32");
  EXPECT_EQ(s.opcode, "mad");
  EXPECT_EQ(s.modifiers, std::vector<std::string>{"lo"});
  EXPECT_EQ(s.dtype, DataType::u32);
  EXPECT_EQ(s.dependency, Dependency::independent);
  EXPECT_EQ(s.count, kDefaultInstructionCount);
  EXPECT_EQ(s.ptx_name(), "mad.lo.u32");
}

TEST(Signature, DependencyAndCount) {
  auto dep = parse_signature("add.u32:dep");
  EXPECT_EQ(dep.dependency, Dependency::dependent);
  EXPECT_EQ(dep.key(), "add.u32:dep");

  auto counted = parse_signature("add.u32x5");
  EXPECT_EQ(counted.count, 5u);
  EXPECT_EQ(counted.key(), "add.u32");
  EXPECT_EQ(counted.signature(), "add.u32x5");

  EXPECT_EQ(parse_signature("add.u32:x7").signature(), "add.u32x7");
  EXPECT_EQ(parse_signature("add.u32:indep").signature(), "add.u32");
  EXPECT_EQ(parse_signature("add.u32:depx4").signature(), "add.u32:depx4");
}

TEST(Signature, RejectsUnknownType) {
  try {
    parse_signature("add.q32");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.token(), "q32");
  }
}

TEST(Signature, RejectsMalformed) {
  EXPECT_THROW(parse_signature(""), ParseError);
  EXPECT_THROW(parse_signature("add"), ParseError);
  EXPECT_THROW(parse_signature("add.u32x0"), ParseError);
  EXPECT_THROW(parse_signature("add.u32:maybe"), ParseError);
}

// Property: print(parse(s)) == s for generated signatures.
TEST(Signature, RandomRoundTrip) {
  std::mt19937 rng(17);
  const std::vector<std::string> opcodes = {"add", "mul", "mad", "min", "neg", "sqrt"};
  const std::vector<std::string> mods = {"lo", "hi", "rn", "approx", "wide"};
  for (int i = 0; i < 300; ++i) {
    InstructionSpec s;
    s.opcode = opcodes[rng() % opcodes.size()];
    for (std::size_t m = rng() % 3; m > 0; --m) s.modifiers.push_back(mods[rng() % mods.size()]);
    s.dtype = kAllDataTypes[rng() % (kAllDataTypes.size() - 1)];  // pred is not an instruction type
    s.dependency = rng() % 2 ? Dependency::dependent : Dependency::independent;
    s.count = 1 + rng() % 9;
    auto text = s.signature();
    auto back = parse_signature(text);
    EXPECT_EQ(back, s) << text;
    EXPECT_EQ(back.signature(), text);
  }
}

TEST(MemoryLevel, RoundTripAndCacheOperator) {
  for (auto l : kAllMemoryLevels) EXPECT_EQ(parse_memory_level(to_string(l)), l);
  EXPECT_EQ(cache_operator(MemoryLevel::global), CacheOp::cv);
  EXPECT_EQ(cache_operator(MemoryLevel::l2), CacheOp::cg);
  EXPECT_EQ(cache_operator(MemoryLevel::l1), CacheOp::ca);
  EXPECT_EQ(cache_operator(MemoryLevel::shared_load), CacheOp::none);
  for (auto op : {CacheOp::cv, CacheOp::cg, CacheOp::ca}) EXPECT_EQ(parse_cache_op(to_string(op)), op);
}

TEST(TensorShape, ParseAndSupport) {
  auto shape = parse_tensor_shape("m16n16k16");
  ASSERT_TRUE(shape);
  EXPECT_EQ(shape->m, 16);
  EXPECT_EQ(shape->to_string(), "m16n16k16");
  EXPECT_FALSE(parse_tensor_shape("m16n16"));

  EXPECT_TRUE(is_supported_tensor_shape({16, 16, 16}, DataType::f16, DataType::f16));
  EXPECT_TRUE(is_supported_tensor_shape({32, 8, 16}, DataType::f16, DataType::f32));
  EXPECT_TRUE(is_supported_tensor_shape({8, 8, 4}, DataType::f64, DataType::f64));
  EXPECT_FALSE(is_supported_tensor_shape({8, 8, 4}, DataType::f16, DataType::f16));
  EXPECT_FALSE(is_supported_tensor_shape({16, 16, 16}, DataType::tf32, DataType::f32));
  EXPECT_FALSE(describe_supported_tensor_shapes().empty());
}

TEST(TensorShape, SignatureParse) {
  auto sig = parse_tensor_signature("m16n16k8.tf32.f32");
  EXPECT_EQ(sig.shape.k, 8);
  EXPECT_EQ(sig.in_type, DataType::tf32);
  EXPECT_EQ(sig.acc_type, DataType::f32);
  EXPECT_THROW(parse_tensor_signature("m16n16k16.f16"), ParseError);
}

TEST(SassMapping, Notations) {
  auto single = parse_sass_mapping("min.u64", "UISETP.LT.U32.AND+2*USEL");
  ASSERT_EQ(single.expansion.size(), 2u);
  EXPECT_EQ(single.expansion[1].opcode, "USEL");
  EXPECT_EQ(single.expansion[1].multiplicity, 2u);
  EXPECT_EQ(single.total_multiplicity(), 3u);
  EXPECT_FALSE(single.multi_instruction);

  auto alt = parse_sass_mapping("neg.f32", "FADD | IMAD.MOV.U32");
  EXPECT_EQ(alt.expansion.size(), 1u);
  ASSERT_EQ(alt.alternatives.size(), 1u);
  EXPECT_EQ(alt.alternatives[0][0].opcode, "IMAD.MOV.U32");

  auto opaque = parse_sass_mapping("sqrt.rn.f32", "multiple(MUFU.RSQ)");
  EXPECT_TRUE(opaque.multi_instruction);
  EXPECT_EQ(opaque.hints, std::vector<std::string>{"MUFU.RSQ"});
  EXPECT_EQ(opaque.notation(), "multiple(MUFU.RSQ)");
  EXPECT_EQ(parse_sass_mapping("fns.b32", "multiple").notation(), "multiple");

  EXPECT_THROW(parse_sass_mapping("x.u32", "0*IADD"), ParseError);
  EXPECT_THROW(parse_sass_mapping("x.u32", ""), ParseError);
}

TEST(LatencyRecord, Invariants) {
  LatencyRecord r;
  r.signature = "add.u32";
  r.mapping = parse_sass_mapping("add.u32", "IADD");
  r.cycles_min = 2;
  r.cycles_max = 2;
  EXPECT_NO_THROW(r.validate());
  r.cycles_min = 3;
  EXPECT_THROW(r.validate(), ValidationError);
  r.cycles_min = -1;
  EXPECT_THROW(r.validate(), ValidationError);
}

TEST(LatencyTable, AddPutRemove) {
  LatencyTable t("A100");
  LatencyRecord r;
  r.signature = "add.u32";
  r.mapping = parse_sass_mapping("add.u32", "IADD");
  r.cycles_min = r.cycles_max = 2;
  t.add(r);
  EXPECT_THROW(t.add(r), ValidationError);
  r.cycles_min = r.cycles_max = 3;
  t.put(r);
  ASSERT_NE(t.find("add.u32"), nullptr);
  EXPECT_EQ(t.find("add.u32")->cycles_min, 3);
  EXPECT_EQ(t.records().size(), 1u);
  EXPECT_TRUE(t.remove("add.u32"));
  EXPECT_FALSE(t.remove("add.u32"));

  TensorCoreOp op;
  op.shape = {16, 16, 16};
  t.add_tensor_op(op);
  EXPECT_THROW(t.add_tensor_op(op), ValidationError);
  t.set_clock_overhead(2);
  EXPECT_FALSE(t.empty());
}

}  // namespace
}  // namespace ptxlat
