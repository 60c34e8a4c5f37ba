#pragma once

#include "admkit/io.hpp"

namespace admkit {

// Command entry points; each consumes the keys it understands and then
// requires the config to be fully consumed.  They throw ConfigError for bad
// input and the numerical error types for failed computations.
void cmd_simulate(RunConfig& config);
void cmd_fit(RunConfig& config);
void cmd_oracle(RunConfig& config);
void cmd_reliability(RunConfig& config);

// Full command-line driver.  Returns 0 on success, 2 for configuration or
// usage errors, 3 for numerical failures.
int run_cli(int argc, const char* const* argv);

}  // namespace admkit
