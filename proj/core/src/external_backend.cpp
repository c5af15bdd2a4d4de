// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// External toolchain backend: three shell commands per benchmark, each with
// a timeout, run through Boost.Process.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <mutex>

#include <boost/asio/io_context.hpp>
#include <boost/process.hpp>
#include <fmt/format.h>

#include "json_model.hpp"
#include "ptxlat/error.hpp"
#include "runner_internal.hpp"
#include "strings.hpp"

namespace ptxlat::runner {

namespace {

namespace bp = boost::process;

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

void check_template(std::string_view name, const std::string& tmpl) {
  if (tmpl.empty()) throw ConfigError(fmt::format("external {} command template is empty", name));
  for (std::string_view ph : {"{input}", "{output}"}) {
    if (tmpl.find(ph) == std::string::npos) {
      throw ConfigError(fmt::format("external {} command template '{}' lacks the {} placeholder", name, tmpl, ph));
    }
  }
}

struct CommandResult {
  int exit_code = 0;
  std::string output;  // stdout followed by stderr
  std::string stdout_text;
};

CommandResult run_command(std::string_view stage, const std::string& command, const std::filesystem::path& dir,
                          const std::map<std::string, std::string>& vars, double timeout_seconds) {
  boost::asio::io_context ioc;
  std::future<std::string> out, err;
  auto env = boost::this_process::environment();
  for (const auto& [k, v] : vars) env[k] = v;
  bp::group group;
  bp::child child(bp::exe = "/bin/sh", bp::args = std::vector<std::string>{"-c", command}, bp::std_in.close(),
                  bp::std_out > out, bp::std_err > err, bp::start_dir = dir.string(), env, group, ioc);
  ioc.run_for(std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(timeout_seconds)));
  bool timed_out = false;
  if (!ioc.stopped()) {
    timed_out = true;
    std::error_code ec;
    group.terminate(ec);
    ioc.run();
  }
  child.wait();
  CommandResult r;
  r.exit_code = child.exit_code();
  r.stdout_text = out.get();
  r.output = r.stdout_text + err.get();
  if (timed_out) {
    throw BackendError(fmt::format("external {} command timed out after {} s: {}", stage, timeout_seconds, command),
                       r.output);
  }
  if (r.exit_code != 0) {
    throw BackendError(fmt::format("external {} command exited with status {}: {}", stage, r.exit_code, command),
                       r.output);
  }
  return r;
}

// One lock per working directory; the compile/launch/trace sequence writes
// files named after the benchmark, and two sweeps must not interleave them.
std::mutex& directory_lock(const std::filesystem::path& dir) {
  static std::mutex guard;
  static std::map<std::filesystem::path, std::mutex> locks;
  std::lock_guard lock(guard);
  return locks[dir];
}

}  // namespace

void ExternalToolchainConfig::validate() const {
  check_template("compile", compile_command_template);
  check_template("launch", launch_command_template);
  check_template("trace", trace_command_template);
  if (!(timeout_seconds > 0)) throw ConfigError(fmt::format("timeout must be positive, got {}", timeout_seconds));
}

ExternalToolchainConfig ExternalToolchainConfig::from_json_text(std::string_view text) {
  auto j = ptxlat::detail::parse_json_text(text, "toolchain config");
  if (!j.is_object()) throw ConfigError("toolchain config must be a JSON object");
  ExternalToolchainConfig c;
  try {
    c.compile_command_template = j.value("compile", "");
    c.launch_command_template = j.value("launch", "");
    c.trace_command_template = j.value("trace", "");
    c.working_dir = j.value("working_dir", ".");
    c.timeout_seconds = j.value("timeout_seconds", 120.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("toolchain config: {}", e.what()));
  }
  return c;
}

ExternalToolchainConfig ExternalToolchainConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read toolchain config '{}'", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

ExternalToolchainConfig ExternalToolchainConfig::from_environment(ExternalToolchainConfig base) {
  auto get = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    return v ? std::optional<std::string>(v) : std::nullopt;
  };
  if (auto v = get("PTXLAT_COMPILE_CMD")) base.compile_command_template = *v;
  if (auto v = get("PTXLAT_LAUNCH_CMD")) base.launch_command_template = *v;
  if (auto v = get("PTXLAT_TRACE_CMD")) base.trace_command_template = *v;
  if (auto v = get("PTXLAT_WORKDIR")) base.working_dir = *v;
  if (auto v = get("PTXLAT_TIMEOUT")) {
    try {
      base.timeout_seconds = std::stod(*v);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("PTXLAT_TIMEOUT '{}' is not a number", *v));
    }
  }
  return base;
}

ExternalToolchainConfig ExternalToolchainConfig::from_environment() { return from_environment(ExternalToolchainConfig{}); }

std::string expand_template(std::string_view tmpl, const std::filesystem::path& input,
                            const std::filesystem::path& output) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.substr(i).starts_with("{input}")) {
      out += shell_quote(input.string());
      i += 7;
    } else if (tmpl.substr(i).starts_with("{output}")) {
      out += shell_quote(output.string());
      i += 8;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

namespace detail {

RunResult run_external(const codegen::Microbenchmark& bench, const ExternalToolchainConfig& config) {
  config.validate();
  const auto dir = std::filesystem::absolute(config.working_dir).lexically_normal();
  std::filesystem::create_directories(dir);
  std::lock_guard lock(directory_lock(dir));

  const auto& id = bench.info.id;
  const auto source = codegen::write_kernel(bench, dir);
  const auto binary = dir / (id + ".bin");
  const auto scratch = dir / (id + ".out");
  const auto trace_path = dir / (id + ".trace");
  std::filesystem::remove(trace_path);

  const std::map<std::string, std::string> vars = {
      {"PTXLAT_BENCH_ID", id},
      {"PTXLAT_BENCH_KIND", std::string(codegen::to_string(bench.info.kind))},
      {"PTXLAT_TIMED_COUNT", std::to_string(bench.info.timed_count)},
  };

  RunResult out;
  out.bench = bench.info;
  out.backend = Backend::external;
  run_command("compile", expand_template(config.compile_command_template, source, binary), dir, vars,
              config.timeout_seconds);
  auto launched = run_command("launch", expand_template(config.launch_command_template, binary, scratch), dir, vars,
                              config.timeout_seconds);
  out.trials = find_clock_lines(launched.stdout_text);
  if (out.trials.empty()) {
    throw BackendError(fmt::format("external launch output for '{}' has no 'CLOCKS <start> <end>' line", id),
                       launched.output);
  }
  run_command("trace", expand_template(config.trace_command_template, binary, trace_path), dir, vars,
              config.timeout_seconds);
  if (!std::filesystem::exists(trace_path)) {
    throw BackendError(fmt::format("external trace command did not produce '{}'", trace_path.string()));
  }
  // Fail here rather than at analysis time when the trace is malformed.
  std::ifstream in(trace_path);
  trace::for_each_event(in, {}, [](const trace::TraceEvent&) {});
  out.trace = trace_path;
  return out;
}

}  // namespace detail

}  // namespace ptxlat::runner
