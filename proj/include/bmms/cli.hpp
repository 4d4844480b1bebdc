#pragma once

#include <string>

#include "bmms/config.hpp"

namespace bmms::cli {

// Batch commands. Each takes the merged configuration (file + overrides),
// throws the library error types on failure and returns 0 on success.
int run_simulate(const KeyValueConfig& cfg);
int run_fit(const KeyValueConfig& cfg);
int run_predict(const KeyValueConfig& cfg);
int run_summarize(const KeyValueConfig& cfg);

// Dispatch by command name; throws InvalidConfig for unknown commands.
int run_command(const std::string& name, const KeyValueConfig& cfg);

// Dispatch with the error-to-exit-code policy applied:
// 0 ok, 1 usage/config, 2 missing input, 3 numerical failure.
int run_command_safely(const std::string& name, const KeyValueConfig& cfg);

}  // namespace bmms::cli
