#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "topoflock/fields.hpp"
#include "topoflock/kernels.hpp"

namespace topoflock {

// kMeanField divides the alignment sum by N; kRaw does not.
enum class WeightConvention { kMeanField, kRaw };

struct AgentOptions {
  WeightConvention convention = WeightConvention::kMeanField;
  double r_floor = 1e-4;        // closer pairs reject the step
  // dt * max_i sum_j w_ij must stay below this. At 1 the RK4 update of a
  // frozen-weight step is a convex combination, so velocities keep their range.
  double stability_bound = 1.0;
};

struct SwarmState {
  double t = 0.0;
  AgentSwarm swarm;
};

struct SwarmRhs {
  std::vector<double> dx;
  std::vector<double> dv;
};

/// Alignment weight w_ij multiplying (v_j - v_i), including the convention
/// factor. Coincident agents use d = (2/N)^(1/dim) and r is clamped to
/// machine epsilon. Zero beyond the kernel support.
double pair_weight(const AgentSwarm& swarm, const KernelSpec& spec, std::size_t i, std::size_t j,
                   const AgentOptions& options = {});

// All weights as a dense row-major N x N matrix.
std::vector<double> weight_matrix(const AgentSwarm& swarm, const KernelSpec& spec,
                                  const AgentOptions& options = {});

SwarmRhs swarm_rhs(const AgentSwarm& swarm, const KernelSpec& spec, const AgentOptions& options = {});

/// Classical RK4. Throws StiffPairDetected when a stage brings two agents
/// closer than r_floor or dt breaks the stability bound.
SwarmState swarm_step(const SwarmState& state, const KernelSpec& spec, double dt,
                      const AgentOptions& options = {});

struct AdvanceResult {
  SwarmState state;
  double dt_used = 0.0;
  int halvings = 0;
};

// swarm_step with dt halved after each StiffPairDetected, up to max_halvings.
AdvanceResult swarm_advance(const SwarmState& state, const KernelSpec& spec, double dt,
                            const AgentOptions& options = {}, int max_halvings = 30);

struct Connectivity {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> component;  // label per agent
  std::size_t components = 0;
};

// Edges where the pair weight exceeds the threshold; components by union-find.
Connectivity connectivity_graph(const AgentSwarm& swarm, const KernelSpec& spec,
                                double threshold = 0.0, const AgentOptions& options = {});

// Largest per-component range of the velocities.
double velocity_diameter(const AgentSwarm& swarm);

// Sum over agents of each velocity component.
std::vector<double> total_momentum(const AgentSwarm& swarm);

// Writes i, x, [y,] vx [, vy].
void write_swarm_csv(std::ostream& os, const AgentSwarm& swarm);

std::string to_string(WeightConvention convention);
WeightConvention weight_convention_from_string(const std::string& name);

}  // namespace topoflock
