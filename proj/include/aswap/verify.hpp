#pragma once

#include <string>
#include <vector>

#include "aswap/config.hpp"

namespace aswap {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Artifact-producing subcommands, in dispatch order (verify-all excluded).
const std::vector<std::string>& artifact_subcommands();

/// Runs one subcommand and writes <subcommand>-<hash>.csv/.json under
/// config.output_dir; returns the paths written.
std::vector<std::string> run_subcommand(const std::string& subcommand,
                                        const RunConfig& config);

/// The full acceptance suite. scratch_dir is used by the determinism check
/// for temporary artifact trees.
std::vector<CheckResult> acceptance_checks(const std::string& scratch_dir);

}  // namespace aswap
