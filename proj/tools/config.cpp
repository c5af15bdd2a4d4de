// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ptxlat/error.hpp"

namespace ptxlat::cli {

namespace {

using nlohmann::json;

void check_keys(const json& object, std::string_view section, const std::set<std::string>& known) {
  if (!object.is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", section));
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!known.contains(it.key())) throw ConfigError(fmt::format("unknown config key '{}.{}'", section, it.key()));
  }
}

template <typename T>
void read(const json& object, const char* key, T& target) {
  if (auto it = object.find(key); it != object.end()) target = it->get<T>();
}

std::map<analysis::TypePair, double> parse_throughput(const json& object) {
  std::map<analysis::TypePair, double> out;
  for (auto it = object.begin(); it != object.end(); ++it) {
    const auto& key = it.key();
    auto slash = key.find('/');
    auto in = parse_data_type(key.substr(0, slash));
    auto acc = slash == std::string::npos ? std::nullopt : parse_data_type(key.substr(slash + 1));
    if (!in || !acc) throw ConfigError(fmt::format("theoretical_throughput key '{}' must be '<in>/<acc>'", key));
    out[{*in, *acc}] = it->get<double>();
  }
  return out;
}

}  // namespace

ToolConfig load_config(const std::filesystem::path& path) {
  ToolConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();

  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  try {
    check_keys(j, "config", {"analysis", "capacities", "virtual_device", "toolchain"});
    if (j.contains("analysis")) {
      const auto& a = j["analysis"];
      check_keys(a, "analysis", {"clock_overhead", "warmup_discard", "shared_followup_cycles", "clock_rate_hz",
                                 "theoretical_throughput"});
      read(a, "clock_overhead", cfg.analysis.clock_overhead);
      read(a, "warmup_discard", cfg.analysis.warmup_discard);
      read(a, "shared_followup_cycles", cfg.analysis.shared_followup_cycles);
      read(a, "clock_rate_hz", cfg.analysis.clock_rate_hz);
      if (a.contains("theoretical_throughput")) {
        cfg.analysis.theoretical_throughput = parse_throughput(a["theoretical_throughput"]);
      }
      cfg.device.clock_overhead = cfg.analysis.clock_overhead;
      cfg.device.shared_followup_cycles = cfg.analysis.shared_followup_cycles;
      cfg.device.clock_rate_hz = cfg.analysis.clock_rate_hz;
    }
    if (j.contains("capacities")) {
      const auto& c = j["capacities"];
      check_keys(c, "capacities", {"l1_bytes", "l2_bytes"});
      read(c, "l1_bytes", cfg.capacities.l1_bytes);
      read(c, "l2_bytes", cfg.capacities.l2_bytes);
    }
    if (j.contains("virtual_device")) {
      const auto& v = j["virtual_device"];
      check_keys(v, "virtual_device", {"clock_overhead", "barrier_penalty", "shared_followup_cycles", "start_clock"});
      read(v, "clock_overhead", cfg.device.clock_overhead);
      read(v, "barrier_penalty", cfg.device.barrier_penalty);
      read(v, "shared_followup_cycles", cfg.device.shared_followup_cycles);
      read(v, "start_clock", cfg.device.start_clock);
    }
    if (j.contains("toolchain")) {
      check_keys(j["toolchain"], "toolchain", {"compile", "launch", "trace", "working_dir", "timeout_seconds"});
      cfg.toolchain = runner::ExternalToolchainConfig::from_json_text(j["toolchain"].dump());
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  cfg.analysis.validate();
  return cfg;
}

}  // namespace ptxlat::cli
