#pragma once

#include "cli_config.hpp"

namespace kmzi::cli {

/// Executes a validated config: writes <out>.csv and <out>.json, returns the
/// process exit code (0 success, 1 numeric failure). Usage problems surface
/// as UsageError from parse_config before this runs.
int run(const RunConfig& config);

}  // namespace kmzi::cli
