// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/report.hpp"
#include "ptxlat/runner.hpp"
#include "ptxlat/trace.hpp"
#include "ptxlat/virtual_device.hpp"

namespace {

using namespace ptxlat;

void BM_BuildChase(benchmark::State& state) {
  codegen::PointerChaseConfig cfg;
  cfg.element_count = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(codegen::build_chase(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildChase)->RangeMultiplier(8)->Range(1024, 1 << 20);

void BM_GenerateAndValidate(benchmark::State& state) {
  const auto spec = parse_signature("mad.lo.u32");
  for (auto _ : state) {
    auto b = codegen::gen_alu(spec);
    benchmark::DoNotOptimize(codegen::validate_ptx(b.source_text));
  }
}
BENCHMARK(BM_GenerateAndValidate);

// Streams a chase trace of range(0) loads through the mapping verifier.
void BM_VerifyChaseTrace(benchmark::State& state) {
  const auto table = seed_paper_table();
  auto bench = codegen::gen_memory(MemoryLevel::l2, codegen::default_chase(MemoryLevel::l2)).info;
  bench.chase->element_count = static_cast<std::uint64_t>(state.range(0));
  bench.timed_count = bench.divisor = bench.chase->element_count;
  const auto result = vdev::run_virtual(bench, table, vdev::MemoryHierarchyModel::from_table(table));
  for (auto _ : state) benchmark::DoNotOptimize(trace::verify_mapping(result.trace, bench, table));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(result.trace.line_count()));
}
BENCHMARK(BM_VerifyChaseTrace)->Arg(1024)->Arg(1 << 16);

void BM_ParseTraceText(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 4096; ++i) text += fmt::format("{}: IADD3 R{}, P0, R2, 0x1, RZ ;\n", i, i % 32);
  for (auto _ : state) benchmark::DoNotOptimize(trace::parse_trace(text));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_ParseTraceText);

void BM_VirtualSweep(benchmark::State& state) {
  const auto table = seed_paper_table();
  std::vector<codegen::BenchInfo> benches;
  for (const auto& r : table.records()) benches.push_back(codegen::gen_alu(parse_signature(r.signature)).info);
  runner::RunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(runner::sweep(benches, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(benches.size()));
}
BENCHMARK(BM_VirtualSweep)->Unit(benchmark::kMillisecond);

void BM_RenderSeed(benchmark::State& state) {
  const auto table = seed_paper_table();
  const auto format = state.range(0) == 0 ? report::Format::markdown : report::Format::csv;
  for (auto _ : state) benchmark::DoNotOptimize(report::render(table, format));
}
BENCHMARK(BM_RenderSeed)->Arg(0)->Arg(1);

void BM_SaveLoadSeed(benchmark::State& state) {
  const auto doc = report::make_document(seed_paper_table());
  for (auto _ : state) benchmark::DoNotOptimize(report::document_from_text(report::document_to_text(doc)));
}
BENCHMARK(BM_SaveLoadSeed);

}  // namespace

BENCHMARK_MAIN();
