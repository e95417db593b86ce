#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "topoflock/agents.hpp"
#include "topoflock/config.hpp"
#include "topoflock/hydro.hpp"
#include "topoflock/metrics.hpp"

namespace topoflock {

struct RunControls {
  bool strict = false;
  bool dump_operators = false;
  bool write_files = true;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RunSummary {
  std::string name;
  std::string mode;
  std::string termination = "completed";
  std::vector<CheckResult> checks;
  std::vector<DiagnosticsRecord> records;
  std::vector<RunSummary> children;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  std::size_t steps = 0;
  int exit_code = 0;

  bool aborted() const { return termination != "completed"; }
  bool all_passed() const;
};

std::string version_string();

// Initial fields for hydro runs: built-in kinds or samples from CSV, with the
// velocity replaced by the e-free construction when requested.
HydroState initial_hydro_state(const ExperimentConfig& config);

// Agents at jittered mass quantiles of the initial density (x) and
// uniformly in y for dim 2; velocities follow the initial velocity profile.
AgentSwarm initial_swarm(const ExperimentConfig& config);

DiagnosticsRecord hydro_record(const HydroState& state, const KernelSpec& spec,
                               const HydroOptions& options, bool with_lambda2);

RunSummary run_experiment(const ExperimentConfig& config, const RunControls& controls = {});

void write_manifest(std::ostream& os, const RunSummary& summary, const ExperimentConfig& config);

}  // namespace topoflock
