// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file run.hpp
 * @brief Scenario orchestration behind the command-line tool.
 *
 * run() validates the configuration, computes every output table in memory
 * and only then creates the output directory, so a failed run leaves no
 * partial results behind. The manifest records the resolved configuration,
 * library version and wall time.
 */

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kickrot/run_config.hpp"

namespace kickrot {

inline constexpr const char* kLibraryVersion = KICKROT_VERSION;

struct RunResult {
  std::vector<std::filesystem::path> files;  ///< Written files, manifest last.
  double wall_time_s = 0.0;
};

/// Throws ConfigError (invalid input), NumericalError (aborted computation) or
/// std::runtime_error (I/O).
RunResult run(const RunConfig& config);

}  // namespace kickrot
