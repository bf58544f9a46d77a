#pragma once

// Experiment orchestration behind the `twave` command line tool. Every command
// takes a fully resolved JSON config and writes its outputs below an output
// directory; the returned JSON is the summary printed by the tool.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "twave/orbit.hpp"
#include "twave/pdesim.hpp"
#include "twave/waveanalysis.hpp"

namespace twave {

using json = nlohmann::json;

/// Defaults for every section; `experiment` selects the command.
json default_config(const std::string& experiment = "simulate");

/// Apply one `dotted.key=value` override. The value is parsed as JSON when
/// possible and taken as a string otherwise. Throws ConfigError for malformed input.
void apply_override(json& cfg, const std::string& assignment);

/// Defaults, merged with `user`, then the overrides in order. Unknown keys are
/// rejected so typos do not pass silently.
json resolve_config(const std::string& experiment, const json& user, const std::vector<std::string>& overrides);

json load_config_file(const std::filesystem::path& path);

/// Solver settings from the model, grid and solver sections.
SolverConfig solver_config(const json& cfg);

/// Initial field from the initial section on the given grid.
FieldPair initial_field(const json& cfg, const Grid& grid);

struct SimulationResult {
    RunResult run;
    std::vector<TypedTrack> tracks;
    RelationReport relations;
    json report;
};

/// Run the solver and the front analysis. With an empty `out` nothing is written.
SimulationResult simulate(const json& cfg, const std::filesystem::path& out);

/// Leading and trailing speeds for one (alpha, epsilon) pair, simulated in
/// physical units on a grid mapped from the rescaled reference grid.
struct SweepRow {
    double alpha = 0.0;
    double epsilon = 0.0;
    double a = 0.0;
    double c_fit_leading = 0.0;
    double c_fit_trailing = 0.0;
    double c_star = 0.0;
    double c_tilde = 0.0;  // shooting bracket midpoint
    std::string status = "ok";
    std::string message;
};

/// Configuration of a single sweep row (used by the sweep and exposed for tests).
json sweep_row_config(const json& cfg, double alpha, double epsilon);

SweepRow run_sweep_row(const json& cfg, double alpha, double epsilon);

json cmd_simulate(const json& cfg, const std::filesystem::path& out);
json cmd_sweep_speeds(const json& cfg, const std::filesystem::path& out, int workers);
json cmd_critical_curve(const json& cfg, const std::filesystem::path& out);
json cmd_inversion_curve(const json& cfg, const std::filesystem::path& out, int workers);
json cmd_bifurcation_map(const json& cfg, const std::filesystem::path& out);
json cmd_orbit(const json& cfg, const std::filesystem::path& out);

/// Dispatch on cfg["experiment"].
json run_experiment(const json& cfg, const std::filesystem::path& out, int workers);

}  // namespace twave
