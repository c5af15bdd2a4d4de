// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "ptxlat/error.hpp"
#include "ptxlat/runner.hpp"
#include "test_support.hpp"

namespace ptxlat::runner {
namespace {

codegen::BenchInfo bench(std::string_view id) { return codegen::bench_from_id(id, seed_paper_table()); }

// Fake toolchain: "compiles" by copying, "launches" by printing the fixture
// clocks and "traces" by copying the fixture trace.
ExternalToolchainConfig fake_toolchain(const std::filesystem::path& work) {
  const auto data = testing::data_dir().string();
  ExternalToolchainConfig c;
  c.compile_command_template = "cp {input} {output}";
  c.launch_command_template = fmt::format("cat '{}'/\"$PTXLAT_BENCH_ID\".clocks # {{input}} {{output}}", data);
  c.trace_command_template = fmt::format("cp '{}'/\"$PTXLAT_BENCH_ID\".trace {{output}} # {{input}}", data);
  c.working_dir = work;
  c.timeout_seconds = 20;
  return c;
}

TEST(Backend, Names) {
  for (auto b : {Backend::virtual_device, Backend::replay, Backend::external}) EXPECT_EQ(parse_backend(to_string(b)), b);
  EXPECT_FALSE(parse_backend("gpu"));
}

TEST(Clocks, Parse) {
  auto t = parse_clocks("# header\nCLOCKS 10 20\n\n30 45\nTHROUGHPUT 1000\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (Trial{10, 20, std::nullopt}));
  EXPECT_EQ(t[1].delta(), 15u);
  EXPECT_EQ(t[1].throughput_cycles, Cycles(1000));
  EXPECT_THROW(parse_clocks(""), ParseError);
  EXPECT_THROW(parse_clocks("CLOCKS 10"), ParseError);
  EXPECT_THROW(parse_clocks("THROUGHPUT 5\n"), ParseError);
  EXPECT_THROW(parse_clocks("hello"), ParseError);
  EXPECT_EQ(find_clock_lines("noise\nCLOCKS 1 2\nmore CLOCKS\nCLOCKS 3 9\n").size(), 2u);
}

TEST(Template, QuotesPlaceholders) {
  auto s = expand_template("cp {input} {output}", "a b.ptx", "out");
  EXPECT_EQ(s, "cp 'a b.ptx' 'out'");
  EXPECT_NE(expand_template("x {input}", "it's", "o").find("it"), std::string::npos);
}

TEST(Toolchain, Validation) {
  ExternalToolchainConfig c = fake_toolchain(".");
  EXPECT_NO_THROW(c.validate());
  c.trace_command_template = "true";
  EXPECT_THROW(c.validate(), ConfigError);
  c = fake_toolchain(".");
  c.timeout_seconds = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  auto j = ExternalToolchainConfig::from_json_text(R"({"compile": "a {input} {output}", "timeout_seconds": 5})");
  EXPECT_EQ(j.compile_command_template, "a {input} {output}");
  EXPECT_EQ(j.timeout_seconds, 5);
  EXPECT_THROW(ExternalToolchainConfig::from_json_text("[1]"), ConfigError);
}

TEST(Virtual, RunProducesTrialsAndTrace) {
  RunConfig cfg;
  auto r = run(bench("add.u32.alu"), cfg);
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_EQ(r.backend, Backend::virtual_device);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.end_clock() - r.start_clock(), 8u);
  ASSERT_TRUE(r.trace);
  EXPECT_TRUE(std::holds_alternative<trace::TraceText>(*r.trace));
}

TEST(Virtual, RangedRecordsGetTwoTrials) {
  RunConfig cfg;
  auto r = run(bench("sqrt.approx.f32.alu"), cfg);
  ASSERT_EQ(r.trials.size(), 2u);
  EXPECT_NE(r.trials[0].delta(), r.trials[1].delta());
}

TEST(Replay, ReadsFixtures) {
  RunConfig cfg;
  cfg.backend = Backend::replay;
  cfg.fixture_dir = testing::data_dir();
  auto r = run(bench("add.u32.alu"), cfg);
  EXPECT_EQ(r.start_clock(), 4096u);
  EXPECT_EQ(r.end_clock(), 4104u);
  ASSERT_TRUE(r.trace);

  try {
    run(bench("l2.memory"), cfg);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("l2.memory"), std::string::npos);
  }
}

TEST(External, FakeToolchainEndToEnd) {
  testing::TempDir work;
  RunConfig cfg;
  cfg.backend = Backend::external;
  cfg.external = fake_toolchain(work.path());
  auto r = run(bench("add.u32.alu"), cfg);
  EXPECT_EQ(r.backend, Backend::external);
  EXPECT_EQ(r.start_clock(), 4096u);
  EXPECT_EQ(r.end_clock(), 4104u);
  EXPECT_TRUE(std::filesystem::exists(work / "add.u32.alu.ptx"));
  EXPECT_TRUE(std::filesystem::exists(work / "add.u32.alu.bin"));

  auto analysis = analyze_results({r}, seed_paper_table());
  ASSERT_TRUE(analysis.failures.empty());
  ASSERT_EQ(analysis.analyzed.size(), 1u);
  ASSERT_TRUE(analysis.analyzed[0].mapping);
  EXPECT_TRUE(analysis.analyzed[0].mapping->matched);
  EXPECT_EQ(analysis.table.find("add.u32")->cycles_min, 2);
}

TEST(External, FailingCommandCarriesOutput) {
  testing::TempDir work;
  RunConfig cfg;
  cfg.backend = Backend::external;
  cfg.external = fake_toolchain(work.path());
  cfg.external.compile_command_template = "echo broken-compiler >&2; exit 3 # {input} {output}";
  try {
    run(bench("add.u32.alu"), cfg);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_NE(e.captured_output().find("broken-compiler"), std::string::npos);
  }
}

TEST(External, Timeout) {
  testing::TempDir work;
  RunConfig cfg;
  cfg.backend = Backend::external;
  cfg.external = fake_toolchain(work.path());
  cfg.external.launch_command_template = "sleep 30 # {input} {output}";
  cfg.external.timeout_seconds = 0.5;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(run(bench("add.u32.alu"), cfg), BackendError);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(10));
}

TEST(External, LaunchWithoutClocks) {
  testing::TempDir work;
  RunConfig cfg;
  cfg.backend = Backend::external;
  cfg.external = fake_toolchain(work.path());
  cfg.external.launch_command_template = "echo nothing # {input} {output}";
  EXPECT_THROW(run(bench("add.u32.alu"), cfg), BackendError);
}

TEST(Sweep, FailuresAreIsolated) {
  RunConfig cfg;
  cfg.backend = Backend::replay;
  cfg.fixture_dir = testing::data_dir();
  for (std::size_t jobs : {std::size_t{1}, std::size_t{4}}) {
    cfg.concurrency = jobs;
    auto results = sweep({bench("add.u32.alu"), bench("l2.memory"), bench("add.u32.alu-clk32")}, cfg);
    ASSERT_EQ(results.size(), 3u);
    EXPECT_EQ(results[0].bench_id(), "add.u32.alu");
    EXPECT_TRUE(results[0].ok());
    EXPECT_FALSE(results[1].ok());
    EXPECT_TRUE(results[1].trials.empty());
    EXPECT_TRUE(results[2].ok());
  }
}

TEST(Results, RoundTrip) {
  RunConfig cfg;
  std::vector<codegen::BenchInfo> benches = {bench("add.u32.alu"), bench("shared_load.shared"),
                                             bench("m16n16k16.f16.f16.wmma"), bench("clock.clock_overhead")};
  auto results = sweep(benches, cfg);
  RunResult failed;
  failed.bench = bench("l1.memory");
  failed.error = "boom";
  results.push_back(failed);

  auto text = results_to_text(results);
  EXPECT_EQ(results_from_text(text), results);
  testing::TempDir dir;
  write_results(results, dir / "results.json");
  EXPECT_EQ(read_results(dir / "results.json"), results);
  EXPECT_THROW(results_from_text("{"), ParseError);
}

TEST(Results, RelativeTracePathsResolve) {
  RunConfig cfg;
  cfg.backend = Backend::replay;
  cfg.fixture_dir = testing::data_dir();
  auto r = run(bench("add.u32.alu"), cfg);
  r.trace = std::filesystem::path("add.u32.alu.trace");
  auto back = results_from_text(results_to_text({r}), testing::data_dir());
  ASSERT_EQ(back.size(), 1u);
  auto analysis = analyze_results(back, seed_paper_table());
  EXPECT_TRUE(analysis.failures.empty());
  EXPECT_TRUE(analysis.analyzed.at(0).mapping->matched);
}

TEST(Analyze, ClockOverheadRunFeedsOthers) {
  RunConfig cfg;
  cfg.device.clock_overhead = 5;
  auto results = sweep({bench("clock.clock_overhead"), bench("add.u32.alu")}, cfg);
  auto a = analyze_results(results, seed_paper_table());
  EXPECT_EQ(a.table.clock_overhead(), 5);
  EXPECT_EQ(a.table.find("add.u32")->cycles_min, 2);
}

TEST(Analyze, FailedRunsAreReported) {
  RunResult failed;
  failed.bench = bench("l1.memory");
  failed.error = "boom";
  auto a = analyze_results({failed}, seed_paper_table());
  EXPECT_EQ(a.failures.size(), 1u);
}

}  // namespace
}  // namespace ptxlat::runner
