#include "topoflock/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "topoflock/errors.hpp"

namespace topoflock {

CommRegion::CommRegion(std::span<const double> x, std::span<const double> y, double length_)
    : dim(static_cast<int>(x.size())), length(length_), midpoint(x.size()), axis(x.size()) {
  double norm2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = torus_displacement(x[k], y[k], length);
    midpoint[k] = x[k] + 0.5 * d;
    axis[k] = d;
    norm2 += d * d;
  }
  const double norm = std::sqrt(norm2);
  r = 0.5 * norm;
  if (norm > 0.0) {
    for (double& a : axis) a /= norm;
  }
}

bool CommRegion::contains(std::span<const double> z) const {
  if (r == 0.0) return false;
  std::vector<double> w(z.size());
  double along = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    w[k] = torus_displacement(midpoint[k], z[k], length);
    along += w[k] * axis[k];
  }
  const double t = along / r;
  if (std::abs(t) >= 1.0) return false;
  double perp2 = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double p = w[k] - along * axis[k];
    perp2 += p * p;
  }
  const double width = r * (1.0 - t * t);
  return perp2 < width * width;
}

bool region_contains(std::span<const double> x, std::span<const double> y,
                     std::span<const double> z, double length) {
  // Build from the lexicographically smaller endpoint so that the test is
  // exactly symmetric in (x, y).
  if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())) {
    return CommRegion(y, x, length).contains(z);
  }
  return CommRegion(x, y, length).contains(z);
}

double topo_distance_1d(const DensityField& rho, double x, double y) {
  const Grid1D& g = rho.grid();
  double lo = g.wrap_position(x);
  double hi = g.wrap_position(y);
  if (lo > hi) std::swap(lo, hi);
  const double inner = rho.cumulative(hi) - rho.cumulative(lo);
  if (hi - lo <= 0.5 * g.length()) return inner;
  return rho.total_mass() - inner;
}

double mass_of_ball(const DensityField& rho, double center, double radius) {
  if (2.0 * radius >= rho.grid().length()) return rho.total_mass();
  return rho.cumulative(center + radius) - rho.cumulative(center - radius);
}

ArcCounter::ArcCounter(const AgentSwarm& swarm) : length_(swarm.length) {
  if (swarm.dim != 1) throw Error("arc counting needs a one-dimensional swarm");
  sorted_ = swarm.positions;
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t ArcCounter::count(double a, double b) const {
  double lo = std::min(a, b);
  double hi = std::max(a, b);
  auto in_closed = [&](double from, double to) {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), to) -
                                    std::lower_bound(sorted_.begin(), sorted_.end(), from));
  };
  if (hi - lo <= 0.5 * length_) return in_closed(lo, hi);
  // The shorter arc wraps through 0.
  return in_closed(hi, length_) + in_closed(0.0, lo);
}

namespace {

bool same_point(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

double topo_distance_discrete(const AgentSwarm& swarm, std::size_t i, std::size_t j) {
  const std::size_t n = swarm.size();
  const auto xi = swarm.position(i);
  const auto xj = swarm.position(j);
  std::size_t count = 0;
  if (same_point(xi, xj)) {
    for (std::size_t k = 0; k < n; ++k) count += same_point(swarm.position(k), xi) ? 1 : 0;
  } else if (swarm.dim == 1) {
    const double a = xi[0], b = xj[0];
    double lo = std::min(a, b), hi = std::max(a, b);
    const bool wraps = hi - lo > 0.5 * swarm.length;
    for (std::size_t k = 0; k < n; ++k) {
      const double z = swarm.positions[k];
      const bool inside = wraps ? (z >= hi || z <= lo) : (z >= lo && z <= hi);
      count += inside ? 1 : 0;
    }
  } else {
    const CommRegion region = std::lexicographical_compare(xj.begin(), xj.end(), xi.begin(), xi.end())
                                  ? CommRegion(xj, xi, swarm.length)
                                  : CommRegion(xi, xj, swarm.length);
    for (std::size_t k = 0; k < n; ++k) {
      const auto z = swarm.position(k);
      if (k == i || k == j || same_point(z, xi) || same_point(z, xj) || region.contains(z)) ++count;
    }
  }
  const double frac = static_cast<double>(count) / static_cast<double>(n);
  return swarm.dim == 1 ? frac : std::sqrt(frac);
}

}  // namespace topoflock
