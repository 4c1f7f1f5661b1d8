#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace riddled::cli {

/// Each command fills `out` with its files and returns the summary block of
/// the manifest.
nlohmann::json cmd_duffing(const RunConfig& cfg, unsigned threads, OutputSet& out);
nlohmann::json cmd_basin_grid(const RunConfig& cfg, unsigned threads, OutputSet& out);
nlohmann::json cmd_tol_scan(const RunConfig& cfg, unsigned threads, OutputSet& out);
nlohmann::json cmd_fraction(const RunConfig& cfg, unsigned threads, OutputSet& out);
nlohmann::json cmd_spin(const RunConfig& cfg, unsigned threads, OutputSet& out);
nlohmann::json cmd_bell(const RunConfig& cfg, unsigned threads, OutputSet& out);

const std::vector<std::string>& subcommands();

/// Runs one subcommand end to end: files plus manifest in `dir`.
void run_subcommand(const std::string& name, const RunConfig& cfg, unsigned threads, const std::string& dir);

/// Process exit code for an exception escaping a subcommand: 2 config error,
/// 3 numerical failure, 4 degenerate statistics, 1 anything else.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace riddled::cli
