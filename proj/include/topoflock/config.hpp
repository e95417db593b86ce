#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "topoflock/agents.hpp"
#include "topoflock/fields.hpp"
#include "topoflock/hydro.hpp"
#include "topoflock/kernels.hpp"

namespace topoflock {

enum class RunMode { kHydro1d, kAgents, kSpectralOnly, kSweep };

struct ExperimentConfig {
  RunMode mode = RunMode::kHydro1d;
  std::string name = "custom";

  // [grid]
  std::size_t n_cells = 256;
  double length = 2.0 * std::numbers::pi;

  // [kernel]
  KernelSpec kernel;

  // [numerics]
  HydroOptions numerics;

  // [initial]
  InitialDataSpec initial;
  bool e0_free = false;
  std::string samples_path;  // CSV (i,x,rho,u) for custom-samples and spectral-only

  // [run]
  double t_final = 10.0;
  std::uint64_t seed = 1;

  // [output]
  std::string out_dir = "out";
  double output_interval = 0.5;
  bool lambda2 = true;
  bool snapshots = true;

  // [agents]
  std::size_t agent_count = 64;
  int agent_dim = 1;
  double agent_dt = 0.01;
  AgentOptions agent_options;

  // [sweep]: each entry is a fully qualified key and the values it takes.
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;
  RunMode sweep_mode = RunMode::kHydro1d;
  std::size_t workers = 1;
};

using KeyValues = std::map<std::string, std::string>;

// Flat "section.key" view. from_key_values reports every violation at once.
KeyValues to_key_values(const ExperimentConfig& config);
ExperimentConfig from_key_values(const KeyValues& values);

// INI text with [run] [grid] [kernel] [numerics] [initial] [output] [agents] [sweep].
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

// Cartesian product of the sweep lists, one child per combination.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

// FNV-1a over the serialized config.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

}  // namespace topoflock
