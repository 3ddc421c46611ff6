#pragma once

#include <map>
#include <optional>
#include <string>

#include "paramot/config.hpp"
#include "paramot/geodesic.hpp"

namespace paramot {

// Process exit codes; the CLI forwards these verbatim.
enum class ExitCode : int {
  ok = 0,
  internal_error = 1,
  validation_failure = 2,
  unconverged = 3,
  numeric_failure = 4
};

struct RunOutput {
  std::string directory = ".";
  bool write_files = true;
};

struct RunResult {
  RunConfig config;
  ExitCode exit_code = ExitCode::ok;
  std::string status = "ok";
  std::map<std::string, double> scalars;
  std::map<std::string, MatrixXd> matrices;
  std::optional<ParamPath> path;
  std::optional<ActionReport> report;
  std::string csv_file;  // written next to the summary; empty when no path
  double wall_clock_ms = 0.0;
  std::string summary_json;
};

// Executes one run. Validation and numeric failures are reported through
// exit_code/status instead of exceptions; an unconverged solve still writes
// its best path. Numeric outputs are a pure function of the config; the
// wall clock is the only nondeterministic field in the summary.
RunResult run(const RunConfig& config, const RunOutput& out = {});

// Resolves the configured basis against sample images (rbf lattices need the
// empirical bounding box of the images at the run's parameter points).
PotentialBasis resolve_basis(const BasisSpec& spec, const MapFamily& fam,
                             const MatrixXd& probe_images);

}  // namespace paramot
