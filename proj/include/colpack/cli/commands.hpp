// commands.hpp - the colpack subcommands.
//
// Each command writes its artifacts under RunConfig::out and returns the
// report it also saved as JSON.
#pragma once

#include <iosfwd>

#include <json.hpp>

#include "colpack/cli/config.hpp"

namespace colpack::cli {

nlohmann::json cmd_pack(const RunConfig& cfg);
nlohmann::json cmd_train(const RunConfig& cfg);
nlohmann::json cmd_simulate(const RunConfig& cfg);
nlohmann::json cmd_pipeline(const RunConfig& cfg);
nlohmann::json cmd_sweep(const RunConfig& cfg);
nlohmann::json cmd_report(const RunConfig& cfg);

// Validates, dispatches on cfg.command and prints the report to `out`.
// Returns 0, or 2/3/4 for configuration, data and invariant errors.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace colpack::cli
