// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Built-in A100 reference data. SASS columns use the notation parsed by
// parse_sass_mapping(); irregular source entries are normalized and the
// original wording is kept in the record note.

#include <initializer_list>

#include "ptxlat/isa_model.hpp"

namespace ptxlat {

namespace {

struct SeedRow {
  std::initializer_list<const char*> names;
  const char* sass;
  std::int64_t min;
  std::int64_t max;
  bool approximate;
  const char* note;
};

// clang-format off
const SeedRow kInstructionRows[] = {
    // Add / sub
    {{"add.u16"}, "UIADD3", 2, 2, false, ""},
    {{"addc.u32"}, "IADD3.X", 2, 2, false, ""},
    {{"add.u32"}, "IADD", 2, 2, false, ""},
    {{"add.u64"}, "UIADD3.X+UIADD3", 4, 4, false, ""},
    {{"add.s64"}, "UIADD3.X+UIADD3", 4, 4, false, ""},
    {{"add.f16"}, "HADD", 2, 2, false, ""},
    {{"add.f32"}, "FADD", 2, 2, false, ""},
    {{"add.f64"}, "DADD", 4, 4, false, ""},
    // Mul
    {{"mul.wide.u16"}, "LOP3.LUT+IMAD", 4, 4, false, ""},
    {{"mul.wide.u32"}, "IMAD", 4, 4, false, ""},
    {{"mul.lo.u16"}, "LOP3.LUT+IMAD", 4, 4, false, ""},
    {{"mul.lo.u32"}, "IMAD", 2, 2, false, ""},
    {{"mul.lo.u64"}, "IMAD", 2, 2, false, ""},
    {{"mul24.lo.u32"}, "PRMT+IMAD", 3, 3, false, ""},
    {{"mul24.hi.u32"}, "UPRMT+USHF.R.U32.HI+IMAD.U32+PRMT", 9, 9, false, ""},
    {{"mul.rn.f16"}, "HMUL2", 2, 2, false, ""},
    {{"mul.rn.f32"}, "FMUL", 2, 2, false, ""},
    {{"mul.rn.f64"}, "DMUL", 4, 4, false, ""},
    // Mad
    {{"mad.lo.u16"}, "LOP3.LUT+IMAD", 4, 4, false, ""},
    {{"mad.lo.u32"}, "FFMA", 2, 2, false,
     "integer mad issued on the floating-point pipeline (FFMA)"},
    {{"mad.lo.u64"}, "IMAD", 2, 2, false, ""},
    {{"mad24.lo.u32"}, "SGXT.U32+IMAD", 4, 4, false, ""},
    {{"mad24.hi.u32"}, "USHF.R.U32.HI+UIMAD.WIDE.U32+2*UPRMT+IADD3", 11, 11, false, ""},
    {{"mad.rn.f32"}, "FFMA", 2, 2, false, ""},
    {{"mad.rn.f64"}, "DFMA", 4, 4, false, ""},
    // Sad
    {{"sad.u16", "sad.s16"}, "2*LOP3+ULOP3+VABSDIFF", 6, 6, false, ""},
    {{"sad.u32", "sad.s32"}, "VABSDIFF+IMAD", 3, 3, false,
     "one IMAD and one UMOV per three instructions"},
    {{"sad.u64", "sad.s64"}, "UISETP.GE.U32.AND+UIADD+IADD", 10, 10, false, ""},
    // Div / rem
    {{"rem.u16", "rem.s16", "div.u16", "div.s16"}, "multiple", 290, 290, true, ""},
    {{"rem.s32", "rem.u32", "div.s32", "div.u32"}, "multiple", 66, 66, false, ""},
    {{"rem.u64", "rem.s64", "div.u64", "div.s64"}, "multiple", 420, 420, true, ""},
    {{"div.rn.f32"}, "multiple", 525, 525, true, ""},
    {{"div.rn.f64"}, "multiple", 426, 426, true, ""},
    // Abs
    {{"abs.s16"}, "PRMT+IABS+PRMT", 4, 4, false, ""},
    {{"abs.s32"}, "IABS", 2, 2, false, ""},
    {{"abs.s64"}, "UISETP.LT.AND+UIADD3.X+UIADD3+2*USEL", 11, 11, true, ""},
    {{"abs.f16"}, "PRMT", 1, 1, false, ""},
    {{"abs.ftz.f32"}, "FADD.FTZ", 2, 2, false, ""},
    {{"abs.f64"}, "DADD | DADD+UMOV", 4, 4, false, ""},
    // Brev
    {{"brev.b32"}, "BREV+SGXT.U32", 2, 2, false, ""},
    {{"brev.b64"}, "2*UBREV+MOV", 6, 6, false, ""},
    // Copysign
    {{"copysign.f32"}, "2*LOP3.LUT", 4, 4, false, "sometimes 1.5 LOP3.LUT per instruction"},
    {{"copysign.f64"}, "2*ULOP3.LUT+IMAD.U32+MOV", 6, 6, false, ""},
    // And
    {{"and.b16"}, "LOP3.LUT", 2, 2, false, "sometimes 1.5 LOP3.LUT per instruction"},
    {{"and.b32"}, "LOP3.LUT", 2, 2, false, ""},
    {{"and.b64"}, "ULOP3.LUT", 2, 3, false, ""},
    // Not
    {{"not.b16"}, "LOP3.LUT", 2, 2, false, ""},
    {{"not.b32"}, "LOP3.LUT", 2, 2, false, ""},
    {{"not.b64"}, "2*ULOP3.LUT", 4, 4, false, ""},
    // Lop3
    {{"lop3.b32"}, "IMAD.MOV.U32+LOP3.LUT", 4, 4, false, ""},
    // Cnot
    {{"cnot.b16"}, "ULOP3.LUT+ISETP.EQ.U32.AND+SEL", 5, 5, false, ""},
    {{"cnot.b32"}, "UISETP.EQ.U32.AND+USEL", 4, 4, false, ""},
    {{"cnot.b64"}, "multiple", 11, 11, false, ""},
    // Bfe
    {{"bfe.s32"}, "3*PRMT+2*IMAD.MOV+SHF.R.U32.HI+SGXT", 11, 11, false, ""},
    {{"bfe.u32"}, "3*PRMT+2*IMAD.MOV+SHF.R.U32.HI+SGXT.U32", 11, 11, false, ""},
    {{"bfe.u64"}, "UMOV+USHF.L.U32+UIADD3+ULOP3.LUT", 5, 5, false,
     "UIADD3+ULOP3.LUT pair may repeat"},
    {{"bfe.s64"}, "multiple", 14, 14, false, ""},
    // Min / max
    {{"min.u16"}, "ULOP3.LUT+UISETP.LT.U32.AND+USEL", 8, 8, false, ""},
    {{"min.u32"}, "IMNMX.U32", 2, 2, false, ""},
    {{"min.u64"}, "UISETP.LT.U32.AND+2*USEL", 8, 8, false, ""},
    {{"min.s16"}, "PRMT+IMNMX", 4, 4, false, ""},
    {{"min.s32"}, "IMNMX", 2, 2, false, ""},
    {{"min.s64"}, "UISETP.LT.U32.AND+UISETP.LT.AND.EX+2*USEL", 8, 8, false, ""},
    {{"min.f16"}, "HMNMX2+PRMT", 4, 4, false, ""},
    {{"min.f32"}, "FMNMX", 2, 2, false, ""},
    {{"min.f64"}, "DSETP.MIN.AND+IMAD.MOV.U32+UMOV+FSEL", 10, 10, false,
     "assumed correction: source lists min.f364"},
    // Neg
    {{"neg.s16"}, "UIADD3+UPRMT", 5, 5, false, ""},
    {{"neg.s32"}, "IADD3", 2, 2, false, ""},
    {{"neg.s64"}, "IMAD.MOV.U32+HFMA2.MMA+MOV+UIADD3", 10, 10, true, ""},
    {{"neg.f32"}, "FADD | IMAD.MOV.U32", 2, 2, false,
     "IMAD.MOV.U32 when operands are initialized with mov"},
    {{"neg.f64"}, "DADD | DADD+UMOV", 4, 4, false, ""},
    // Fma
    {{"fma.rn.f16"}, "HFMA2", 2, 2, false, ""},
    {{"fma.rn.f32"}, "FFMA", 2, 2, false, ""},
    {{"fma.rn.f64"}, "DFMA", 4, 4, false, ""},
    // Sqrt / rsqrt
    {{"sqrt.rn.f32"}, "multiple(MUFU.RSQ)", 190, 235, false, ""},
    {{"sqrt.approx.f32"}, "multiple(MUFU.SQRT)", 2, 18, false, ""},
    {{"sqrt.rn.f64"}, "multiple(MUFU.RSQ64)", 260, 340, false, ""},
    {{"rsqrt.approx.f32"}, "multiple(MUFU.RSQ)", 2, 18, false, ""},
    {{"rsqrt.approx.f64"}, "MUFU.RSQ64H", 8, 11, false, ""},
    // Rcp
    {{"rcp.rn.f32"}, "multiple(MUFU.RCP)", 198, 198, false, ""},
    {{"rcp.approx.f32"}, "multiple(MUFU.RCP)", 23, 23, false, ""},
    {{"rcp.rn.f64"}, "multiple(MUFU.RCP64H)", 244, 244, false, ""},
    {{"ex2.approx.f32"}, "FSTEP+2*FMUL+MUFU.EX2 | FSETP.GEU.AND+2*FMUL+MUFU.EX2", 14, 18, false,
     "listed twice in the source (14 and 18 cycles); merged into a range"},
    // Popc / clz / bfind
    {{"popc.b32"}, "POPC", 6, 6, false, "source lists popc.b32S"},
    {{"popc.b64"}, "2*UPOPC+UIADD3", 7, 7, false, ""},
    {{"clz.b32"}, "FLO.U32+IADD", 7, 7, false, ""},
    {{"clz.b64"}, "UISETP.NE.U32.AND+USEL+UFLO.U32+2*UIADD3", 13, 13, false, ""},
    {{"bfind.u32"}, "FLO.U32", 6, 6, false, ""},
    {{"bfind.u64"}, "FLO.U32+ISETP.NE.U32.AND+IADD3+BRA", 164, 164, false, ""},
    {{"bfind.s32"}, "FLO", 6, 6, false, ""},
    {{"bfind.s64"}, "multiple", 195, 195, false, ""},
    // Testp
    {{"testp.normal.f32"}, "IMAD.MOV.U32+2*ISETP.GE.U32.AND", 0, 6, false,
     "0 or 6 cycles depending on state"},
    {{"testp.subnor.f32"}, "ISETP.LT.U32.AND", 0, 6, false, "0 or 6 cycles depending on state"},
    {{"testp.normal.f64"}, "2*UISETP.LE.U32.AND+2*UISETP.GE.U32.AND", 13, 13, false, ""},
    {{"testp.subnor.f64"}, "UISETP.LT.U32.AND+2*UISETP.GE.U32.AND.EX", 8, 8, false, ""},
    // Other
    {{"sin.approx.f32"}, "FMUL+MUFU.SIN", 8, 8, false, ""},
    {{"cos.approx.f32"}, "FMUL.RZ+MUFU.COS", 8, 8, false, ""},
    {{"lg2.approx.f32"}, "FSETP.GEU.AND+FMUL+MUFU.LG2+FADD", 18, 18, false, ""},
    {{"ex2.approx.f16"}, "MUFU.EX2.F16", 6, 6, false, ""},
    {{"tanh.approx.f32"}, "MUFU.TANH", 6, 6, false, ""},
    {{"tanh.approx.f16"}, "MUFU.TANH.F16", 6, 6, false, ""},
    {{"fns.b32"}, "multiple", 79, 79, false, ""},
    {{"cvt.rzi.s32.f32"}, "F2I.TRUNC.NTZ", 6, 6, false, ""},
    {{"setp.ne.s32"}, "ISETP.NE.AND", 10, 10, false, ""},
    // Bfi
    {{"bfi.b32"}, "3*PRMT+2*IMAD.MOV+SHF.L.U32+BMSK+LOP3.LUT", 11, 11, true, ""},
    {{"bfi.b64"}, "UMOV+USHF.L.U32+UIADD3+ULOP3.LUT", 5, 5, false,
     "UIADD3+ULOP3.LUT pair may repeat"},
    // dp4a / dp2a
    {{"dp4a.u32.u32"}, "IMAD.MOV.U32+IDP.4A.U8.U8", 135, 170, false, ""},
    {{"dp2a.lo.u32.u32"}, "IMAD.MOV.U32+IDP.2A.LO.U16.U8", 135, 170, false, ""},
};

struct DependentRow {
  const char* name;
  const char* sass;
  std::int64_t dependent;
  std::int64_t independent;
  const char* note;
};

const DependentRow kDependentRows[] = {
    {"add.f16", "HADD", 3, 2, ""},
    {"add.u32", "IADD3 | IMAD.IADD", 4, 2, "dependent chains compile to IADD3 or IMAD.IADD"},
    {"add.f64", "DADD", 5, 4, ""},
    {"mul.lo.u32", "IMAD", 3, 2, ""},
    {"mad.rn.f32", "FFMA", 4, 2, ""},
};
// clang-format on

TensorCoreOp make_op(TensorShape shape, DataType in, DataType acc, Layout layout_b,
                     const char* ptx, const char* sass, int count, int per_sass,
                     double measured, double theoretical) {
  TensorCoreOp op;
  op.shape = shape;
  op.in_type = in;
  op.acc_type = acc;
  op.layout_a = Layout::row;
  op.layout_b = layout_b;
  op.layout_c = Layout::row;
  op.ptx_instruction = ptx;
  op.sass_opcode = sass;
  op.sass_count = count;
  op.per_sass_cycles = per_sass;
  op.measured_throughput = measured;
  op.theoretical_throughput = theoretical;
  return op;
}

}  // namespace

LatencyTable seed_paper_table() {
  LatencyTable table("A100");

  for (const auto& row : kInstructionRows) {
    for (const char* name : row.names) {
      LatencyRecord record;
      record.signature = parse_signature(name).key();
      record.mapping = parse_sass_mapping(record.signature, row.sass);
      record.cycles_min = Cycles(row.min);
      record.cycles_max = Cycles(row.max);
      record.approximate = row.approximate;
      record.source = Source::paper_seed;
      record.note = row.note;
      table.add(std::move(record));
    }
  }

  for (const auto& row : kDependentRows) {
    InstructionSpec spec = parse_signature(row.name);
    spec.dependency = Dependency::dependent;
    LatencyRecord record;
    record.signature = spec.key();
    record.mapping = parse_sass_mapping(record.signature, row.sass);
    record.cycles_min = record.cycles_max = Cycles(row.dependent);
    record.source = Source::paper_seed;
    record.note = row.note;
    table.add(std::move(record));
  }

  table.set_memory(MemoryLevel::global, {Cycles(290), false});
  table.set_memory(MemoryLevel::l2, {Cycles(200), true});
  table.set_memory(MemoryLevel::l1, {Cycles(33), false});
  table.set_memory(MemoryLevel::shared_load, {Cycles(23), false});
  table.set_memory(MemoryLevel::shared_store, {Cycles(19), false});
  table.set_clock_overhead(2);

  using DT = DataType;
  table.add_tensor_op(make_op({16, 16, 16}, DT::f16, DT::f16, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m16n16k16.f16.f16",
                              "HMMA.16816.F16", 2, 8, 311, 312));
  table.add_tensor_op(make_op({16, 16, 16}, DT::f16, DT::f32, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m16n16k16.f16.f32",
                              "HMMA.16816.F32", 2, 8, 310, 312));
  table.add_tensor_op(make_op({16, 16, 16}, DT::bf16, DT::f32, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m16n16k16.f32.bf16.bf16.f32",
                              "HMMA.16816.F32.BF16", 2, 8, 310, 312));
  table.add_tensor_op(make_op({16, 16, 8}, DT::tf32, DT::f32, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m16n16k8.f32.tf32.tf32.f32",
                              "HMMA.1684.F32.TF32", 4, 4, 132, 156));
  table.add_tensor_op(make_op({8, 8, 4}, DT::f64, DT::f64, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m8n8k4.f64.f64.f64.f64.rn",
                              "DMMA.884", 1, 16, 19, 19.5));
  table.add_tensor_op(make_op({16, 16, 16}, DT::u8, DT::u32, Layout::row,
                              "wmma.mma.sync.aligned.row.row.m16n16k16.s32.u8.u8.s32",
                              "IMMA.16816.U8.U8", 2, 4, 594, 624));
  table.add_tensor_op(make_op({8, 8, 32}, DT::u4, DT::u32, Layout::col,
                              "wmma.mma.sync.aligned.row.col.m8n8k32.s32.u4.u4.s32",
                              "IMMA.8832.U4.U4", 1, 4, 1229, 1248));
  return table;
}

const std::map<std::uint32_t, Cycles>& reference_launch_curve() {
  static const std::map<std::uint32_t, Cycles> kCurve = {
      {1, Cycles(5)}, {2, Cycles(3)}, {3, Cycles(2)}, {4, Cycles(2)}};
  return kCurve;
}

std::span<const DependencyPair> reference_dependency_pairs() {
  static const std::vector<DependencyPair> kPairs = [] {
    std::vector<DependencyPair> out;
    for (const auto& row : kDependentRows) {
      out.push_back({row.name, Cycles(row.dependent), Cycles(row.independent)});
    }
    return out;
  }();
  return kPairs;
}

}  // namespace ptxlat
