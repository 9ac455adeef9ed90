/// @file experiment.hpp
/// @brief Runs a configured flow, audits it and writes its output directory.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rym/config.hpp"

namespace rym {

enum ExitCode : int {
  kExitOk = 0,
  kExitNumericalFailure = 1,
  kExitSingularity = 2,
  kExitAuditViolation = 3,
  kExitConfigError = 4,
};

struct ExperimentResult {
  int exit_code = kExitOk;
  std::string termination;
  std::string message;
  std::filesystem::path out_dir;
  bool audits_pass = true;
};

/// $RYM_OUT_DIR when set and non-empty, otherwise cfg.outputs.dir.
std::filesystem::path output_root(const RunConfig& cfg);

/// Initial field on a mesh. File fields hold one value per line, one line per vertex.
ScalarField evaluate_field(const FieldExpr& expr, const MeshSurface& mesh);

/// Runs the flow (or the homogeneous ODE), audits the trajectory and writes
/// timeseries.csv, snapshots/, verdict.json, meta.json and, for singular runs,
/// singular_time.json into output_root(cfg) / cfg.name.
///
/// Exit codes: 0 ok, 1 numerical failure, 2 singularity, 3 audit violation.
/// A config problem found while running (bad field file, unwritable output)
/// throws ConfigError.
ExperimentResult run_experiment(const RunConfig& cfg);

/// The four topological-case scenarios: case1 (chi < 0, homogeneous), case2 (torus,
/// lambda = 1), case3 (trivial sphere, finite-time collapse), case4 (sphere, c1 = 1).
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace rym
