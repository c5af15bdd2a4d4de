// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

// Optional configuration file shared by the subcommands.
//
//   {
//     "analysis":       {"clock_overhead": 2, "warmup_discard": 2,
//                        "shared_followup_cycles": 2, "clock_rate_hz": 1.41e9,
//                        "theoretical_throughput": {"f16/f16": 312, ...}},
//     "capacities":     {"l1_bytes": 196608, "l2_bytes": 41943040},
//     "virtual_device": {"clock_overhead": 2, "barrier_penalty": 33,
//                        "shared_followup_cycles": 2, "start_clock": 4096},
//     "toolchain":      {"compile": "...", "launch": "...", "trace": "...",
//                        "working_dir": "...", "timeout_seconds": 120}
//   }
//
// Every section and key is optional.

#pragma once

#include <filesystem>

#include "ptxlat/analysis.hpp"
#include "ptxlat/codegen.hpp"
#include "ptxlat/runner.hpp"
#include "ptxlat/virtual_device.hpp"

namespace ptxlat::cli {

struct ToolConfig {
  analysis::AnalysisConfig analysis;
  codegen::DeviceCapacities capacities;
  vdev::VirtualDeviceConfig device;
  runner::ExternalToolchainConfig toolchain;
};

// An empty path yields the defaults. Throws ConfigError on unknown sections
// or keys and on values of the wrong type.
ToolConfig load_config(const std::filesystem::path& path);

}  // namespace ptxlat::cli
