// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/runner.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json_model.hpp"
#include "ptxlat/error.hpp"
#include "runner_internal.hpp"
#include "strings.hpp"

namespace ptxlat::runner {

namespace {

using ptxlat::detail::json;

constexpr int kResultsSchema = 1;

std::string read_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {} '{}'", what, path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t parse_clock_value(std::string_view token, std::string_view source, std::size_t line) {
  auto v = ptxlat::detail::parse_int<std::uint64_t>(token);
  if (!v) {
    throw ParseError(fmt::format("{} line {}: '{}' is not a clock value", source, line, token), std::string(token),
                     line);
  }
  return *v;
}

bool ranged(const codegen::BenchInfo& bench, const LatencyTable& table) {
  const auto* spec = bench.instruction();
  if (!spec) return false;
  const auto* record = table.find(spec->key());
  return record && !record->is_point();
}

RunResult run_virtual(const codegen::BenchInfo& bench, const RunConfig& config) {
  RunResult out;
  out.bench = bench;
  out.backend = Backend::virtual_device;
  const auto trials = std::max<std::uint32_t>(config.trials, ranged(bench, config.table) ? 2 : 1);
  for (std::uint32_t t = 0; t < trials; ++t) {
    auto r = vdev::run_virtual(bench, config.table, config.memory, config.device, t);
    out.trials.push_back({r.start_clock, r.end_clock, r.throughput_cycles});
    for (auto& n : r.notes) {
      if (std::find(out.diagnostics.begin(), out.diagnostics.end(), n) == out.diagnostics.end()) {
        out.diagnostics.push_back(std::move(n));
      }
    }
    if (t == 0) out.trace = std::move(r.trace);
  }
  return out;
}

RunResult run_replay(const codegen::BenchInfo& bench, const RunConfig& config) {
  const auto dir = std::filesystem::absolute(config.fixture_dir);
  const auto trace_path = dir / (bench.id + ".trace");
  const auto clocks_path = dir / (bench.id + ".clocks");
  for (const auto& p : {clocks_path, trace_path}) {
    if (!std::filesystem::exists(p)) {
      throw BackendError(fmt::format("missing replay fixture '{}' for benchmark '{}'", p.string(), bench.id));
    }
  }
  RunResult out;
  out.bench = bench;
  out.backend = Backend::replay;
  out.trials = parse_clocks(read_file(clocks_path, "clocks file"), clocks_path.string());
  out.trace = trace_path;
  return out;
}

json trial_to_json(const Trial& t) {
  json j = {{"start_clock", t.start_clock}, {"end_clock", t.end_clock}};
  if (t.throughput_cycles) j["throughput_cycles"] = ptxlat::detail::cycles_to_json(*t.throughput_cycles);
  return j;
}

Trial trial_from_json(const json& j) {
  Trial t;
  const auto& s = ptxlat::detail::require(j, "start_clock");
  const auto& e = ptxlat::detail::require(j, "end_clock");
  if (!s.is_number_unsigned() || !e.is_number_unsigned()) {
    throw ParseError("trial clocks must be non-negative integers", "start_clock");
  }
  t.start_clock = s.get<std::uint64_t>();
  t.end_clock = e.get<std::uint64_t>();
  if (j.contains("throughput_cycles")) {
    t.throughput_cycles = ptxlat::detail::cycles_from_json(j["throughput_cycles"], "throughput_cycles");
  }
  return t;
}

json trace_to_json(const trace::TraceText& t) {
  json blocks = json::array();
  for (const auto& b : t.blocks()) blocks.push_back({{"lines", b.lines}, {"repeat", b.repeat}});
  return {{"blocks", std::move(blocks)}};
}

trace::TraceText trace_from_json(const json& j) {
  trace::TraceText t;
  const auto& blocks = ptxlat::detail::require(j, "blocks");
  if (!blocks.is_array()) throw ParseError("trace blocks must be an array", "blocks");
  for (const auto& b : blocks) {
    auto lines = ptxlat::detail::require(b, "lines").get<std::vector<std::string>>();
    auto repeat = ptxlat::detail::require(b, "repeat").get<std::uint64_t>();
    t.add_repeated(std::move(lines), repeat);
  }
  return t;
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::virtual_device: return "virtual";
    case Backend::replay: return "replay";
    case Backend::external: return "external";
  }
  return "?";
}

std::optional<Backend> parse_backend(std::string_view text) noexcept {
  if (text == "virtual") return Backend::virtual_device;
  if (text == "replay") return Backend::replay;
  if (text == "external") return Backend::external;
  return std::nullopt;
}

std::vector<Trial> parse_clocks(std::string_view text, std::string_view source) {
  std::vector<Trial> out;
  std::size_t line_no = 0;
  for (auto raw : ptxlat::detail::split(text, '\n')) {
    ++line_no;
    auto line = ptxlat::detail::trim(raw);
    if (line.empty() || line.starts_with('#')) continue;
    auto words = ptxlat::detail::split_ws(line);
    if (!words.empty() && words[0] == "THROUGHPUT") {
      if (words.size() != 2 || out.empty()) {
        throw ParseError(fmt::format("{} line {}: THROUGHPUT needs one value and a preceding trial", source, line_no),
                         std::string(line), line_no);
      }
      try {
        out.back().throughput_cycles = parse_cycles(words[1]);
      } catch (const ParseError&) {
        throw ParseError(fmt::format("{} line {}: bad throughput cycles '{}'", source, line_no, words[1]),
                         std::string(words[1]), line_no);
      }
      continue;
    }
    if (!words.empty() && words[0] == "CLOCKS") words.erase(words.begin());
    if (words.size() != 2) {
      throw ParseError(fmt::format("{} line {}: expected '<start> <end>' or 'CLOCKS <start> <end>'", source, line_no),
                       std::string(line), line_no);
    }
    Trial t{parse_clock_value(words[0], source, line_no), parse_clock_value(words[1], source, line_no), {}};
    if (t.end_clock < t.start_clock) {
      throw ParseError(fmt::format("{} line {}: end clock {} precedes start clock {}", source, line_no, t.end_clock,
                                   t.start_clock),
                       std::string(line), line_no);
    }
    out.push_back(t);
  }
  if (out.empty()) throw ParseError(fmt::format("{}: no clock readings", source));
  return out;
}

std::vector<Trial> find_clock_lines(std::string_view output) {
  std::vector<Trial> out;
  for (auto raw : ptxlat::detail::split(output, '\n')) {
    auto words = ptxlat::detail::split_ws(ptxlat::detail::trim(raw));
    if (words.size() != 3 || words[0] != "CLOCKS") continue;
    auto s = ptxlat::detail::parse_int<std::uint64_t>(words[1]);
    auto e = ptxlat::detail::parse_int<std::uint64_t>(words[2]);
    if (s && e && *e >= *s) out.push_back({*s, *e, {}});
  }
  return out;
}

RunResult run(const codegen::Microbenchmark& bench, const RunConfig& config) {
  switch (config.backend) {
    case Backend::virtual_device: return run_virtual(bench.info, config);
    case Backend::replay: return run_replay(bench.info, config);
    case Backend::external: return detail::run_external(bench, config.external);
  }
  throw ConfigError("unknown backend");
}

RunResult run(const codegen::BenchInfo& bench, const RunConfig& config) {
  if (config.backend == Backend::external) {
    return detail::run_external(codegen::regenerate(bench, {config.memory.l1_bytes, config.memory.l2_bytes}),
                                config.external);
  }
  return run(codegen::Microbenchmark{bench, {}}, config);
}

std::vector<RunResult> sweep(const std::vector<codegen::BenchInfo>& benches, const RunConfig& config) {
  std::vector<RunResult> results(benches.size());
  auto one = [&](std::size_t i) {
    try {
      results[i] = run(benches[i], config);
    } catch (const std::exception& e) {
      RunResult failed;
      failed.bench = benches[i];
      failed.backend = config.backend;
      failed.error = e.what();
      if (const auto* be = dynamic_cast<const BackendError*>(&e); be && !be->captured_output().empty()) {
        failed.diagnostics.push_back(be->captured_output());
      }
      results[i] = std::move(failed);
    }
  };
  std::size_t workers = config.concurrency == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.concurrency;
  workers = std::min(workers, benches.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < benches.size(); ++i) one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < benches.size(); i = next++) one(i);
    });
  }
  pool.clear();
  return results;
}

// ---------------------------------------------------------------------------

std::string results_to_text(const std::vector<RunResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    json j = {{"bench", ptxlat::detail::bench_to_json(r.bench)},
              {"backend", to_string(r.backend)},
              {"diagnostics", r.diagnostics}};
    json trials = json::array();
    for (const auto& t : r.trials) trials.push_back(trial_to_json(t));
    j["trials"] = std::move(trials);
    if (!r.error.empty()) j["error"] = r.error;
    if (r.trace) {
      if (const auto* text = std::get_if<trace::TraceText>(&*r.trace)) {
        j["trace"] = trace_to_json(*text);
      } else {
        j["trace_path"] = std::get<std::filesystem::path>(*r.trace).generic_string();
      }
    }
    arr.push_back(std::move(j));
  }
  json doc = {{"schema_version", kResultsSchema}, {"results", std::move(arr)}};
  return doc.dump(2) + "\n";
}

std::vector<RunResult> results_from_text(std::string_view text, const std::filesystem::path& base_dir) {
  auto doc = ptxlat::detail::parse_json_text(text, "results");
  if (!doc.is_object()) throw ParseError("results file must hold a JSON object");
  const int schema = doc.value("schema_version", 0);
  if (schema != kResultsSchema) {
    throw MigrationError(
        fmt::format("results schema_version {} is not supported (expected {})", schema, kResultsSchema));
  }
  const auto& arr = ptxlat::detail::require(doc, "results");
  if (!arr.is_array()) throw ParseError("'results' must be an array", "results");
  std::vector<RunResult> out;
  for (const auto& j : arr) {
    RunResult r;
    r.bench = ptxlat::detail::bench_from_json(ptxlat::detail::require(j, "bench"));
    auto backend = parse_backend(ptxlat::detail::require_string(j, "backend"));
    if (!backend) throw ParseError(fmt::format("{}: unknown backend", r.bench.id), "backend");
    r.backend = *backend;
    for (const auto& t : ptxlat::detail::require(j, "trials")) r.trials.push_back(trial_from_json(t));
    if (j.contains("diagnostics")) r.diagnostics = j["diagnostics"].get<std::vector<std::string>>();
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    if (j.contains("trace") && j.contains("trace_path")) {
      throw ParseError(fmt::format("{}: both an inline trace and a trace path", r.bench.id), "trace");
    }
    if (j.contains("trace")) {
      r.trace = trace_from_json(j["trace"]);
    } else if (j.contains("trace_path")) {
      std::filesystem::path p = j["trace_path"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      r.trace = p;
    }
    if (r.ok() && r.trials.empty()) throw ParseError(fmt::format("{}: no trials recorded", r.bench.id), "trials");
    out.push_back(std::move(r));
  }
  return out;
}

void write_results(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write results '{}'", path.string()));
  out << results_to_text(results);
}

std::vector<RunResult> read_results(const std::filesystem::path& path) {
  return results_from_text(read_file(path, "results file"), path.parent_path());
}

// ---------------------------------------------------------------------------

AnalysisRun analyze_results(const std::vector<RunResult>& results, const LatencyTable& reference,
                            analysis::AnalysisConfig cfg) {
  AnalysisRun out;
  for (const auto& r : results) {
    if (r.ok() && r.bench.kind == codegen::BenchKind::clock_overhead &&
        r.bench.clock_width == codegen::ClockWidth::bits64 && !r.trials.empty()) {
      cfg.clock_overhead = static_cast<std::int64_t>(r.trials.front().delta());
      out.notes.push_back(fmt::format("clock overhead {} measured by {}", cfg.clock_overhead, r.bench.id));
      break;
    }
  }
  cfg.validate();

  for (const auto& r : results) {
    if (!r.ok()) {
      out.failures.push_back(fmt::format("{}: {}", r.bench.id, r.error));
      continue;
    }
    std::optional<trace::MappingReport> mapping;
    std::vector<std::string> notes;
    if (!r.trace) {
      notes.push_back("no trace; SASS mapping not verified");
    } else {
      try {
        if (const auto* text = std::get_if<trace::TraceText>(&*r.trace)) {
          mapping = trace::verify_mapping(*text, r.bench, reference);
        } else {
          mapping = trace::verify_mapping_file(std::get<std::filesystem::path>(*r.trace), r.bench, reference);
        }
      } catch (const ConfigError& e) {
        notes.push_back(fmt::format("SASS mapping not verified: {}", e.what()));
      } catch (const Error& e) {
        out.failures.push_back(fmt::format("{}: {}", r.bench.id, e.what()));
        continue;
      }
    }
    try {
      for (const auto& t : r.trials) {
        auto a = analysis::analyze_measurement(r.bench, t.start_clock, t.end_clock, cfg, t.throughput_cycles);
        a.mapping = mapping;
        a.notes.insert(a.notes.end(), notes.begin(), notes.end());
        out.analyzed.push_back(std::move(a));
      }
    } catch (const Error& e) {
      out.failures.push_back(fmt::format("{}: {}", r.bench.id, e.what()));
    }
  }
  out.table = analysis::build_latency_table(out.analyzed, cfg, &out.notes);
  out.table.set_architecture(reference.architecture());
  return out;
}

}  // namespace ptxlat::runner
