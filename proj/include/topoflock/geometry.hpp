#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topoflock/fields.hpp"

namespace topoflock {

/// Communication region between x and y: a solid of revolution about the
/// segment xy whose half-width at normalized axial coordinate t in [-1, 1]
/// is r (1 - t^2), r = |x - y| / 2. Periodic images are resolved around the
/// midpoint.
struct CommRegion {
  int dim = 1;
  double length = 0.0;
  std::vector<double> midpoint;
  std::vector<double> axis;
  double r = 0.0;

  CommRegion(std::span<const double> x, std::span<const double> y, double length);
  bool contains(std::span<const double> z) const;
};

bool region_contains(std::span<const double> x, std::span<const double> y,
                     std::span<const double> z, double length);

// Mass of the shorter arc between x and y.
double topo_distance_1d(const DensityField& rho, double x, double y);

// Trapezoid mass between nodes i and i + k, 0 <= k < n/2.
inline double topo_distance_nodes(const DensityField& rho, std::size_t i, std::size_t k) {
  const auto a = static_cast<std::ptrdiff_t>(i);
  return rho.node_cumulative(a + static_cast<std::ptrdiff_t>(k)) - rho.node_cumulative(a);
}

// Mass of the open arc (center - radius, center + radius).
double mass_of_ball(const DensityField& rho, double center, double radius);

/// Counts agents in the closed region between agents i and j (both tips
/// included) and returns (count / N)^(1/dim). In dim 1 the region is the
/// shorter arc. Coincident agents count everybody sitting on that point.
double topo_distance_discrete(const AgentSwarm& swarm, std::size_t i, std::size_t j);

/// Dim-1 helper answering closed-arc counts in O(log N) from sorted positions.
class ArcCounter {
 public:
  explicit ArcCounter(const AgentSwarm& swarm);
  std::size_t count(double a, double b) const;

 private:
  double length_;
  std::vector<double> sorted_;
};

}  // namespace topoflock
