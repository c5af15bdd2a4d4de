// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ptxlat/runner.hpp"

namespace ptxlat::runner::detail {

// Compiles, launches and traces one kernel with the external toolchain.
RunResult run_external(const codegen::Microbenchmark& bench, const ExternalToolchainConfig& config);

}  // namespace ptxlat::runner::detail
