// Command layer shared by the CLI and the tests.
//
// Each command takes a compiled model plus per-invocation overrides and
// produces one report in two renderings: human-readable text and a JSON
// document (sorted keys, so byte-identical across runs). The CLI is a thin
// argument-parsing shell around run_command.

#pragma once

#include <optional>
#include <string>

#include "bipartition/config.hpp"

namespace bipartition {

enum class Command {
    validate,      // parse + compile only; report scene summary
    partition,     // split H along a division, report blocks and coupling norm
    normal_modes,  // frequencies, participation, transform classification
    ground_state,  // ground-state moments and symplectic spectrum
    entangle,      // entanglement report for one division
    compare,       // entanglement reports for all divisions of the model
    invert_means,  // measured-moment inversion through a point-like transform
    evolve,        // propagate under noise, report state and E_N trajectory
    shield_search, // rank divisions by entanglement degradation rate
    oracle_check,  // grid-oracle cross-check of entropy and log negativity
};

const char* to_string(Command command);

/// Command name as spelled on the CLI ("normal-modes"); throws config_error
/// for unknown names.
Command parse_command_name(const std::string& name);

/// CLI flag overrides; unset fields fall back to the model's run section or
/// built-in defaults.
struct RunOverrides {
    std::optional<std::string> division;
    std::optional<std::string> transform;
    std::optional<double> tolerance;   // oracle agreement tolerance (default 1e-3)
    std::optional<int> grid;           // oracle grid points per axis
    std::optional<double> horizon;     // evolve duration / search window
};

struct Report {
    std::string text;
    std::string json;
};

/// Executes one command. Errors surface as the library exceptions
/// (config_error, validity_error, numeric_error); the CLI maps them to exit
/// codes 2, 3, 4.
Report run_command(Command command, const CompiledModel& model, const RunOverrides& overrides = {});

}  // namespace bipartition
