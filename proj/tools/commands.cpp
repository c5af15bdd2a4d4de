// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ptxlat/codegen.hpp"
#include "ptxlat/error.hpp"
#include "ptxlat/report.hpp"
#include "ptxlat/runner.hpp"
#include "ptxlat/trace.hpp"

namespace ptxlat::cli {

namespace {

namespace fs = std::filesystem;
using codegen::BenchKind;
using codegen::Microbenchmark;

constexpr std::string_view kSeedLiteral = "seed";
constexpr std::string_view kManifestName = "manifest.json";

// "seed" (or nothing) is the built-in table, anything else a table file.
LatencyTable load_table(std::string_view arg) {
  if (arg.empty() || arg == kSeedLiteral) return seed_paper_table();
  return report::load(fs::path(arg));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const fs::path& path, std::string_view text) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

codegen::ClockWidth parse_clock(std::string_view text) {
  if (text == "64") return codegen::ClockWidth::bits64;
  if (text == "32") return codegen::ClockWidth::bits32;
  if (auto w = codegen::parse_clock_width(text)) return *w;
  throw ConfigError(fmt::format("--clock must be 32 or 64, got '{}'", text));
}

codegen::SharedDirection parse_direction(std::string_view text) {
  if (text == "load" || text == "ld" || text == "shared_load") return codegen::SharedDirection::load;
  if (text == "store" || text == "st" || text == "shared_store") return codegen::SharedDirection::store;
  throw ParseError(fmt::format("shared benchmark must be 'load' or 'store', got '{}'", text), std::string(text));
}

MemoryLevel parse_cached_level(std::string_view text) {
  auto level = parse_memory_level(text);
  if (!level || *level == MemoryLevel::shared_load || *level == MemoryLevel::shared_store) {
    throw ParseError(fmt::format("memory level must be global, l2 or l1, got '{}'", text), std::string(text));
  }
  return *level;
}

struct GenContext {
  const GenOptions& opts;
  codegen::DeviceCapacities capacities;
  codegen::ClockWidth width;
  LatencyTable table;
};

Microbenchmark gen_memory_for(const GenContext& ctx, MemoryLevel level) {
  auto chase = codegen::default_chase(level, ctx.capacities);
  if (ctx.opts.elements) chase.element_count = *ctx.opts.elements;
  return codegen::gen_memory(level, chase, ctx.capacities, ctx.width);
}

std::vector<Microbenchmark> gen_one(const GenContext& ctx, BenchKind kind, std::string_view spec) {
  auto need_spec = [&] {
    if (spec.empty()) throw ConfigError(fmt::format("--spec is required for kind '{}'", to_string(kind)));
  };
  switch (kind) {
    case BenchKind::clock_overhead:
      return {codegen::gen_clock_overhead(ctx.width)};
    case BenchKind::alu:
      need_spec();
      return {codegen::gen_alu(parse_signature(spec), ctx.width)};
    case BenchKind::memory:
      need_spec();
      return {gen_memory_for(ctx, parse_cached_level(spec))};
    case BenchKind::shared:
      need_spec();
      return {codegen::gen_shared(parse_direction(spec), ctx.width)};
    case BenchKind::wmma:
      need_spec();
      return {codegen::gen_wmma(codegen::tensor_op_for(spec, ctx.table), ctx.opts.iters, ctx.width)};
  }
  return {};
}

std::vector<Microbenchmark> gen_all(const GenContext& ctx, BenchKind kind) {
  std::vector<Microbenchmark> out;
  switch (kind) {
    case BenchKind::clock_overhead:
      out.push_back(codegen::gen_clock_overhead(ctx.width));
      break;
    case BenchKind::alu:
      for (const auto& r : ctx.table.records()) out.push_back(codegen::gen_alu(parse_signature(r.signature), ctx.width));
      break;
    case BenchKind::memory:
      for (auto level : {MemoryLevel::global, MemoryLevel::l2, MemoryLevel::l1}) {
        out.push_back(gen_memory_for(ctx, level));
      }
      break;
    case BenchKind::shared:
      out.push_back(codegen::gen_shared(codegen::SharedDirection::load, ctx.width));
      out.push_back(codegen::gen_shared(codegen::SharedDirection::store, ctx.width));
      break;
    case BenchKind::wmma:
      for (const auto& op : ctx.table.tensor_ops()) out.push_back(codegen::gen_wmma(op, ctx.opts.iters, ctx.width));
      break;
  }
  return out;
}

void print_lines(std::FILE* stream, const std::vector<std::string>& lines, std::string_view prefix) {
  for (const auto& l : lines) fmt::print(stream, "{}{}\n", prefix, l);
}

}  // namespace

int cmd_gen(const GenOptions& opts, const ToolConfig& cfg) {
  if (opts.all == !opts.spec.empty()) throw ConfigError("gen needs exactly one of --spec or --all");

  GenContext ctx{opts, cfg.capacities, parse_clock(opts.clock), load_table(opts.table)};
  if (opts.l1_bytes) ctx.capacities.l1_bytes = *opts.l1_bytes;
  if (opts.l2_bytes) ctx.capacities.l2_bytes = *opts.l2_bytes;

  std::vector<BenchKind> kinds;
  if (!opts.kind.empty()) {
    auto k = codegen::parse_bench_kind(opts.kind);
    if (!k) throw ConfigError(fmt::format("unknown --kind '{}'", opts.kind));
    kinds.push_back(*k);
  } else if (opts.all) {
    kinds = {BenchKind::clock_overhead, BenchKind::alu, BenchKind::memory, BenchKind::shared, BenchKind::wmma};
  } else {
    kinds.push_back(BenchKind::alu);
  }

  std::vector<Microbenchmark> benches;
  for (auto k : kinds) {
    auto part = opts.all ? gen_all(ctx, k) : gen_one(ctx, k, opts.spec);
    std::move(part.begin(), part.end(), std::back_inserter(benches));
  }

  // New entries merge into an existing manifest in the output directory.
  const auto manifest_path = opts.out / kManifestName;
  codegen::Manifest manifest;
  if (fs::exists(manifest_path)) {
    manifest = codegen::read_manifest(manifest_path);
    if (manifest.capacities != ctx.capacities && !manifest.benchmarks.empty()) {
      throw ConfigError(fmt::format("'{}' was generated for different cache capacities; use another --out",
                                    manifest_path.string()));
    }
  }
  manifest.capacities = ctx.capacities;
  fs::create_directories(opts.out);
  for (const auto& b : benches) {
    codegen::write_kernel(b, opts.out);
    manifest.put(b.info);
  }
  codegen::write_manifest(manifest, manifest_path);
  fmt::print("generated {} kernel(s) in {}; manifest lists {}\n", benches.size(), opts.out.string(),
             manifest.benchmarks.size());
  return kExitOk;
}

int cmd_validate(const ValidateOptions& opts) {
  int rc = kExitOk;
  for (const auto& file : opts.files) {
    auto report = codegen::validate_ptx(read_text(file));
    fmt::print("{}: {}", file.string(), report.summary());
    if (!report.valid) rc = kExitFailure;
  }
  return rc;
}

int cmd_run(const RunOptions& opts, const ToolConfig& cfg) {
  auto backend = runner::parse_backend(opts.backend);
  if (!backend) throw ConfigError(fmt::format("unknown backend '{}' (expected virtual, replay or external)", opts.backend));
  auto manifest = codegen::read_manifest(opts.manifest);

  runner::RunConfig rc;
  rc.backend = *backend;
  rc.table = load_table(opts.table);
  rc.memory = vdev::MemoryHierarchyModel::from_table(rc.table, manifest.capacities);
  rc.device = cfg.device;
  rc.trials = opts.trials;
  rc.concurrency = opts.jobs;
  rc.fixture_dir = opts.fixtures.empty() ? opts.manifest.parent_path() : opts.fixtures;
  if (rc.fixture_dir.empty()) rc.fixture_dir = ".";
  if (*backend == runner::Backend::external) {
    auto tc = opts.toolchain.empty() ? cfg.toolchain : runner::ExternalToolchainConfig::from_file(opts.toolchain);
    rc.external = runner::ExternalToolchainConfig::from_environment(tc);
    rc.external.validate();
  }

  auto results = runner::sweep(manifest.benchmarks, rc);
  runner::write_results(results, opts.out);

  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.ok()) continue;
    ++failed;
    fmt::print(stderr, "{}: {}\n", r.bench_id(), r.error);
    print_lines(stderr, r.diagnostics, "  ");
  }
  fmt::print("{} of {} benchmark(s) succeeded; results in {}\n", results.size() - failed, results.size(),
             opts.out.string());
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_analyze(const AnalyzeOptions& opts, const ToolConfig& cfg) {
  auto results = runner::read_results(opts.results);
  auto reference = load_table(opts.table);
  auto run = runner::analyze_results(results, reference, cfg.analysis);
  if (!opts.arch.empty()) run.table.set_architecture(opts.arch);
  report::save(run.table, opts.out);

  print_lines(stderr, run.notes, "note: ");
  print_lines(stderr, run.failures, "failed: ");
  fmt::print("analyzed {} measurement(s); {} record(s) written to {}\n", run.analyzed.size(),
             run.table.records().size(), opts.out.string());
  return run.failures.empty() ? kExitOk : kExitFailure;
}

int cmd_verify_mapping(const VerifyOptions& opts, const ToolConfig& cfg) {
  auto table = load_table(opts.table);
  codegen::BenchInfo bench;
  if (!opts.manifest.empty()) {
    auto manifest = codegen::read_manifest(opts.manifest);
    const auto* found = manifest.find(opts.bench);
    if (!found) throw ConfigError(fmt::format("'{}' is not listed in {}", opts.bench, opts.manifest.string()));
    bench = *found;
  } else {
    bench = codegen::bench_from_id(opts.bench, table, cfg.capacities);
  }
  if (!fs::exists(opts.trace)) throw ConfigError(fmt::format("cannot read trace '{}'", opts.trace.string()));

  trace::ParseOptions parse;
  parse.strict = !opts.lenient;
  trace::MappingReport rep;
  try {
    rep = trace::verify_mapping_file(opts.trace, bench, table, parse);
  } catch (const ParseError& e) {
    // A malformed trace is a verification failure, not a usage error.
    fmt::print(stderr, "ptxlat: {}: {}\n", opts.trace.string(), e.what());
    return kExitFailure;
  }
  fmt::print("{}", rep.summary());
  return rep.matched ? kExitOk : kExitFailure;
}

int cmd_report(const ReportOptions& opts) {
  auto format = report::parse_format(opts.format);
  if (!format) throw ConfigError(fmt::format("unknown --format '{}' (expected md or csv)", opts.format));
  write_output(opts.out, report::render(load_table(opts.table), *format));
  return kExitOk;
}

int cmd_diff(const DiffOptions& opts) {
  auto result = report::diff(load_table(opts.a), load_table(opts.b));
  fmt::print("{}", result.summary());
  return result.empty() ? kExitOk : kExitFailure;
}

int cmd_seed(const SeedOptions& opts) {
  auto text = report::document_to_text(report::make_document(seed_paper_table()));
  write_output(opts.out, text);
  return kExitOk;
}

}  // namespace ptxlat::cli
