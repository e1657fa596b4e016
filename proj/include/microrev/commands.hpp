#pragma once

#include <json.hpp>

#include "microrev/config.hpp"

namespace microrev::app {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitThreshold = 3;

struct CommandResult {
  int exit_code = kExitSuccess;
  nlohmann::json summary;  // printed by the CLI
};

// Each command validates the config, writes its tables into config.output
// and finishes with manifest.json.

/// spectrum.csv: t_ns and every level relative to the ground state.
CommandResult cmd_spectrum(const RunConfig& config);

/// transition_<dir>.csv/.json, preparation.csv/.json and leakage.json.
CommandResult cmd_run(const RunConfig& config, Direction direction);

/// Forward and backward runs, microrev.json and microrev_cells.csv. Exit code 3
/// when the subspace max deviation exceeds config.microrev_tolerance.
CommandResult cmd_microrev(const RunConfig& config);

/// Work distributions, BK ratio records and the BK equality table per temperature.
CommandResult cmd_gibbs(const RunConfig& config);

/// Dephasing ratio trace and detector report.
CommandResult cmd_noise(const RunConfig& config);

}  // namespace microrev::app
