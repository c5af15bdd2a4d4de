// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "ptxlat/error.hpp"

namespace {

using namespace ptxlat::cli;

int report_error(int code, std::string_view what) {
  fmt::print(stderr, "ptxlat: error: {}\n", what);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ptxlat: PTX instruction latency microbenchmarks, analysis and latency tables"};
  app.set_version_flag("--version", "ptxlat 0.1.0");
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 benchmark or verification failure, 2 usage or configuration error.\n"
      "Table arguments accept the literal 'seed' for the built-in reference table.");

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file (analysis, capacities, virtual_device, toolchain)")
      ->envname("PTXLAT_CONFIG");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate microbenchmark kernels and a manifest");
  gen_cmd->add_option("--spec", gen.spec,
                      "Benchmark target: PTX signature (alu), global|l2|l1 (memory), load|store (shared), "
                      "tensor signature such as m16n16k16.f16.f16 (wmma)");
  gen_cmd->add_flag("--all", gen.all, "Generate every benchmark of --kind (or of every kind)");
  gen_cmd->add_option("--kind", gen.kind, "alu, memory, shared, wmma or clock_overhead");
  gen_cmd->add_option("--out", gen.out, "Output directory (manifest.json is written there)");
  gen_cmd->add_option("--clock", gen.clock, "Clock register width: 64 or 32")->capture_default_str();
  gen_cmd->add_option("--iters", gen.iters, "WMMA loop iterations")->capture_default_str();
  gen_cmd->add_option("--elements", gen.elements, "Pointer-chase element count (memory)");
  gen_cmd->add_option("--l1-bytes", gen.l1_bytes, "L1 capacity used by the sizing rule");
  gen_cmd->add_option("--l2-bytes", gen.l2_bytes, "L2 capacity used by the sizing rule");
  gen_cmd->add_option("--table", gen.table, "Table supplying instruction and tensor-op inventories");

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check generated kernels and their timed-region counts");
  validate_cmd->add_option("files", validate.files, "Kernel files")->required()->check(CLI::ExistingFile);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Execute the benchmarks of a manifest");
  run_cmd->add_option("--manifest", run.manifest, "Manifest file")->capture_default_str();
  run_cmd->add_option("--backend", run.backend, "virtual, replay or external")->capture_default_str();
  run_cmd->add_option("--table", run.table, "Table driving the virtual device (default: seed)");
  run_cmd->add_option("--out", run.out, "Results file")->capture_default_str();
  run_cmd->add_option("--fixtures", run.fixtures, "Replay fixture directory (default: the manifest's directory)");
  run_cmd->add_option("--toolchain", run.toolchain, "External toolchain JSON (compile, launch, trace templates)");
  run_cmd->add_option("--trials", run.trials, "Trials per benchmark")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", run.jobs, "Parallel benchmarks (0: hardware concurrency)")->capture_default_str();

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Turn run results into a latency table");
  analyze_cmd->add_option("--results", analyze.results, "Results file")->capture_default_str();
  analyze_cmd->add_option("--out", analyze.out, "Table file to write")->capture_default_str();
  analyze_cmd->add_option("--table", analyze.table, "Reference table for expected SASS (default: seed)");
  analyze_cmd->add_option("--arch", analyze.arch, "Architecture name stored in the table");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify-mapping", "Check a SASS trace against the expected mapping");
  verify_cmd->add_option("--trace", verify.trace, "SASS trace file")->required();
  verify_cmd->add_option("--bench", verify.bench, "Benchmark id, e.g. add.u32.alu")->required();
  verify_cmd->add_option("--manifest", verify.manifest, "Manifest to look the benchmark up in");
  verify_cmd->add_option("--table", verify.table, "Reference table (default: seed)");
  verify_cmd->add_flag("--lenient", verify.lenient, "Skip malformed trace lines instead of failing");

  ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Render a table as markdown or CSV");
  report_cmd->add_option("--table", rep.table, "Table file or 'seed'")->required();
  report_cmd->add_option("--format", rep.format, "md or csv")->capture_default_str();
  report_cmd->add_option("--out", rep.out, "Output file (default: stdout)");

  DiffOptions dif;
  auto* diff_cmd = app.add_subcommand("diff", "Compare two tables (a - b); exit 1 when they differ");
  diff_cmd->add_option("--a", dif.a, "First table file or 'seed'")->required();
  diff_cmd->add_option("--b", dif.b, "Second table file or 'seed'")->required();

  SeedOptions seed;
  auto* seed_cmd = app.add_subcommand("seed", "Write the built-in reference table");
  seed_cmd->add_option("--out", seed.out, "Table file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate);
    if (*report_cmd) return cmd_report(rep);
    if (*diff_cmd) return cmd_diff(dif);
    if (*seed_cmd) return cmd_seed(seed);

    const auto cfg = load_config(config_path);
    if (*gen_cmd) return cmd_gen(gen, cfg);
    if (*run_cmd) return cmd_run(run, cfg);
    if (*analyze_cmd) return cmd_analyze(analyze, cfg);
    if (*verify_cmd) return cmd_verify_mapping(verify, cfg);
  } catch (const ptxlat::ConfigError& e) {
    return report_error(kExitUsage, e.what());
  } catch (const ptxlat::ParseError& e) {
    return report_error(kExitUsage, e.what());
  } catch (const ptxlat::MigrationError& e) {
    return report_error(kExitUsage, e.what());
  } catch (const ptxlat::GenerationError& e) {
    return report_error(kExitUsage, e.what());
  } catch (const ptxlat::BackendError& e) {
    if (!e.captured_output().empty()) fmt::print(stderr, "{}\n", e.captured_output());
    return report_error(kExitFailure, e.what());
  } catch (const ptxlat::Error& e) {
    return report_error(kExitFailure, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error(kExitUsage, e.what());
  } catch (const std::exception& e) {
    return report_error(kExitFailure, e.what());
  }
  return kExitUsage;
}
