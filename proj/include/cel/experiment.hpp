/// @file experiment.hpp
/// @brief Batch experiments: initial data, simulation, ledger evaluation, outputs.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "cel/config.hpp"
#include "cel/estimates.hpp"
#include "cel/solver.hpp"

namespace cel {

/// All ledger entry names accepted by evaluate_checks.
const std::vector<std::string>& ledger_check_names();
/// Names that need a simulated trajectory.
bool needs_trajectory(const std::vector<std::string>& names);

/// Snapshot from cfg.input, else the named preset on an (n, L) grid.
ScalarField initial_field(const ExperimentConfig& cfg);

/// Simulation with cfg.checkpoints even checkpoints and the weak-form probes.
Trajectory run_simulation(const ExperimentConfig& cfg, const ScalarField& omega0);

/// Trajectory from a previous run's output directory (fields/ and config.toml).
Trajectory load_trajectory(const std::string& dir, ExperimentConfig* cfg_out = nullptr);

/// Evaluates the named checks in ledger order; traj may be null when none needs it.
/// Progress lines go to log when non-null.
std::vector<InequalityCheck> evaluate_checks(const ExperimentConfig& cfg, const Trajectory* traj,
                                             const std::vector<std::string>& names, std::FILE* log = nullptr);

/// 2 when any check failed, else 0.
int ledger_exit_code(const std::vector<InequalityCheck>& checks);

/// fields/omega_NNN.cel, fields/times.csv, norms.csv, ledger.csv, summary.txt, config.toml.
void write_run_outputs(const ExperimentConfig& cfg, const Trajectory& traj, const std::vector<InequalityCheck>& checks);

/// Creates the directory (and parents) or throws IoError when not writable.
void ensure_output_dir(const std::string& dir);

}  // namespace cel
