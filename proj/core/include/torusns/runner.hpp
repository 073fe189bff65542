#pragma once

#include <string>

#include "torusns/config.hpp"
#include "torusns/scheme.hpp"

namespace torusns {

/// Builds the problem data fields named by the config presets (the random
/// ones drawn with the counter-based generator from config.seed).
ProblemData build_problem_data(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 physics-level failure
  std::string summary;
  std::string output_dir;
};

/// Full pipeline: certify, initialize, delta continuation, monitors.
/// Writes monitors.csv, report.txt and checkpoints under the output
/// directory (TORUSNS_OUTPUT_DIR overrides config.output_dir).
RunOutcome run_pipeline(const RunConfig& cfg);

/// Continuous-dependence twin: both configs through the same pipeline at
/// the smallest scheduled delta; writes twin.csv and twin_report.txt.
RunOutcome twin_pipeline(const RunConfig& a, const RunConfig& b, const std::string& out_dir);

/// Helpers shared with the CLI.
std::string resolve_output_dir(const std::string& configured);

}  // namespace torusns
