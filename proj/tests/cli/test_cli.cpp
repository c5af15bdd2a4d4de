// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/report.hpp"
#include "test_support.hpp"

namespace ptxlat {
namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

struct Outcome {
  int code = -1;
  std::string output;
};

class Cli : public ::testing::Test {
 protected:
  Outcome run(const std::string& args, const std::string& env = {}) {
    const auto log = dir_ / "log.txt";
    const auto cmd = fmt::format("cd {} && {} {} {} > {} 2>&1", q(dir_.path()), env, q(PTXLAT_CLI_PATH), args, q(log));
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::read_file(log)};
  }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  testing::TempDir dir_;
};

TEST_F(Cli, HelpAndVersion) {
  EXPECT_EQ(run("--help").code, 0);
  auto v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.output.find("ptxlat"), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, GenSingleSpec) {
  auto r = run("gen --spec add.u32 --out k");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(std::filesystem::exists(path("k/add.u32.alu.ptx")));
  auto m = codegen::read_manifest(path("k/manifest.json"));
  ASSERT_EQ(m.benchmarks.size(), 1u);

  ASSERT_EQ(run("gen --spec l2 --kind memory --out k").code, 0);
  EXPECT_EQ(codegen::read_manifest(path("k/manifest.json")).benchmarks.size(), 2u);
  ASSERT_EQ(run("gen --spec m16n16k16.f16.f16 --kind wmma --iters 8 --out k").code, 0);
  EXPECT_TRUE(std::filesystem::exists(path("k/m16n16k16.f16.f16x8.wmma.cu")));
}

TEST_F(Cli, GenErrors) {
  auto bad = run("gen --spec add.q32 --out k");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.output.find("q32"), std::string::npos);
  EXPECT_EQ(run("gen --out k").code, 2);
  EXPECT_EQ(run("gen --spec add.u32 --all --out k").code, 2);
  EXPECT_EQ(run("gen --spec frob.u32 --out k").code, 2);
  EXPECT_EQ(run("gen --spec l1 --kind memory --elements 100000 --out k").code, 2);
  EXPECT_EQ(run("gen --spec add.u32 --kind tensor --out k").code, 2);
}

TEST_F(Cli, ValidateGeneratedAndFixtures) {
  ASSERT_EQ(run("gen --all --kind shared --out k").code, 0);
  EXPECT_EQ(run(fmt::format("validate {} {}", q(path("k/shared_load.shared.ptx")),
                            q(testing::data_dir() / "add_u32_listing.ptx")))
                .code,
            0);
  testing::write_file(path("broken.ptx"), "// nothing here\n");
  EXPECT_EQ(run(fmt::format("validate {}", q(path("broken.ptx")))).code, 1);
  EXPECT_EQ(run("validate missing.ptx").code, 2);
}

TEST_F(Cli, PipelineAndDiff) {
  ASSERT_EQ(run("gen --all --kind alu --out k").code, 0);
  auto r = run("run --manifest k/manifest.json --backend virtual --out results.json");
  ASSERT_EQ(r.code, 0) << r.output;
  r = run("analyze --results results.json --out table.json");
  ASSERT_EQ(r.code, 0) << r.output;
  auto measured = report::load(path("table.json"));
  EXPECT_NE(measured.find("add.u32"), nullptr);
  EXPECT_NE(measured.find("add.u32:dep"), nullptr);

  // Only instruction records were measured; the rest shows up as removed.
  auto d = run("diff --a table.json --b seed");
  EXPECT_EQ(d.code, 1);
  EXPECT_EQ(run("diff --a seed --b seed").code, 0);

  auto md = run("report --table table.json --format md --out table.md");
  ASSERT_EQ(md.code, 0) << md.output;
  EXPECT_EQ(testing::read_file(path("table.md")), report::render(measured, report::Format::markdown));
  EXPECT_EQ(run("report --table table.json --format html").code, 2);
}

TEST_F(Cli, RunBackendErrors) {
  ASSERT_EQ(run("gen --spec add.u32 --out k").code, 0);
  EXPECT_EQ(run("run --manifest k/manifest.json --backend gpu").code, 2);
  EXPECT_EQ(run("run --manifest nothing.json").code, 2);
  // Replay without fixtures: the entry fails, the command reports it.
  auto r = run("run --manifest k/manifest.json --backend replay --out results.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("add.u32.alu"), std::string::npos);
}

TEST_F(Cli, ReplayFixtures) {
  codegen::Manifest m;
  m.put(codegen::bench_from_id("add.u32.alu", seed_paper_table()));
  codegen::write_manifest(m, path("manifest.json"));
  auto r = run(fmt::format("run --manifest manifest.json --backend replay --fixtures {} --out results.json",
                           q(testing::data_dir())));
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_EQ(run("analyze --results results.json --out table.json").code, 0);
  EXPECT_EQ(report::load(path("table.json")).find("add.u32")->cycles_min, 2);
}

TEST_F(Cli, VerifyMapping) {
  const auto data = testing::data_dir();
  EXPECT_EQ(run(fmt::format("verify-mapping --trace {} --bench add.u32.alu", q(data / "add.u32.alu.trace"))).code, 0);
  auto r = run(fmt::format("verify-mapping --trace {} --bench add.u32.alu-clk32", q(data / "add.u32.alu-clk32.trace")));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("BAR"), std::string::npos);
  EXPECT_EQ(run("verify-mapping --trace missing.trace --bench add.u32.alu").code, 2);
  testing::write_file(path("bad.trace"), "CS2R R1, SR_CLOCKLO\n12:\n");
  EXPECT_EQ(run("verify-mapping --trace bad.trace --bench add.u32.alu").code, 1);
}

TEST_F(Cli, SeedAndConfig) {
  auto r = run("seed --out seed.json");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(report::load(path("seed.json")), seed_paper_table());

  testing::write_file(path("cfg.json"), R"({"analysis": {"clock_overhead": 2}})");
  EXPECT_EQ(run("--config cfg.json gen --spec add.u32 --out k").code, 0);
  testing::write_file(path("bad.json"), R"({"analysis": {"surprise": 1}})");
  EXPECT_EQ(run("--config bad.json gen --spec add.u32 --out k").code, 2);
  EXPECT_EQ(run("gen --spec add.u32 --out k", "PTXLAT_CONFIG=bad.json").code, 2);
}

TEST_F(Cli, GenRejectsCapacityMismatch) {
  ASSERT_EQ(run("gen --spec add.u32 --out k").code, 0);
  EXPECT_EQ(run("gen --spec l1 --kind memory --l1-bytes 65536 --out k").code, 2);
}

}  // namespace
}  // namespace ptxlat
