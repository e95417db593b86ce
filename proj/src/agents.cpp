#include "topoflock/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "topoflock/errors.hpp"
#include "topoflock/geometry.hpp"

namespace topoflock {

namespace {

double convention_factor(const AgentSwarm& swarm, const AgentOptions& options) {
  return options.convention == WeightConvention::kMeanField ? 1.0 / static_cast<double>(swarm.size())
                                                            : 1.0;
}

// Fraction of agents strictly within r0 of agent i (observer ball mass).
double ball_fraction(const AgentSwarm& swarm, std::size_t i, double r0) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < swarm.size(); ++k) {
    if (torus_distance(swarm.position(i), swarm.position(k), swarm.length) < r0) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(swarm.size());
}

double min_pair_distance(const AgentSwarm& swarm, std::size_t* a, std::size_t* b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    for (std::size_t j = i + 1; j < swarm.size(); ++j) {
      const double r = torus_distance(swarm.position(i), swarm.position(j), swarm.length);
      if (r < best) {
        best = r;
        *a = i;
        *b = j;
      }
    }
  }
  return best;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

double pair_weight(const AgentSwarm& swarm, const KernelSpec& spec, std::size_t i, std::size_t j,
                   const AgentOptions& options) {
  if (i == j) return 0.0;
  double r = torus_distance(swarm.position(i), swarm.position(j), swarm.length);
  if (r >= spec.support()) return 0.0;
  r = std::max(r, std::numeric_limits<double>::epsilon());
  double d;
  if (spec.family == KernelFamily::kMotschTadmor) {
    d = ball_fraction(swarm, i, spec.r0);
  } else if (r <= std::numeric_limits<double>::epsilon()) {
    d = std::pow(2.0 / static_cast<double>(swarm.size()), 1.0 / swarm.dim);
  } else {
    d = topo_distance_discrete(swarm, i, j);
  }
  return eval_phi(spec, r, d) * convention_factor(swarm, options);
}

std::vector<double> weight_matrix(const AgentSwarm& swarm, const KernelSpec& spec,
                                  const AgentOptions& options) {
  const std::size_t n = swarm.size();
  std::vector<double> w(n * n, 0.0);
  const bool symmetric = spec.family != KernelFamily::kMotschTadmor;
  const double factor = convention_factor(swarm, options);
  const double eps = std::numeric_limits<double>::epsilon();
  const double fallback = std::pow(2.0 / static_cast<double>(n), 1.0 / swarm.dim);
  std::unique_ptr<ArcCounter> arcs;
  if (swarm.dim == 1 && symmetric) arcs = std::make_unique<ArcCounter>(swarm);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = symmetric ? i + 1 : 0; j < n; ++j) {
      if (i == j) continue;
      if (!symmetric) {
        w[i * n + j] = pair_weight(swarm, spec, i, j, options);
        continue;
      }
      double r = torus_distance(swarm.position(i), swarm.position(j), swarm.length);
      if (r >= spec.support()) continue;
      double d;
      if (r <= eps) {
        d = fallback;
        r = eps;
      } else if (arcs) {
        d = static_cast<double>(arcs->count(swarm.positions[i], swarm.positions[j])) /
            static_cast<double>(n);
      } else {
        d = topo_distance_discrete(swarm, i, j);
      }
      const double v = eval_phi(spec, r, d) * factor;
      w[i * n + j] = v;
      w[j * n + i] = v;
    }
  }
  return w;
}

SwarmRhs swarm_rhs(const AgentSwarm& swarm, const KernelSpec& spec, const AgentOptions& options) {
  const std::size_t n = swarm.size();
  const auto dim = static_cast<std::size_t>(swarm.dim);
  const std::vector<double> w = weight_matrix(swarm, spec, options);
  SwarmRhs out{swarm.velocities, std::vector<double>(swarm.velocities.size(), 0.0)};
  const bool symmetric = spec.family != KernelFamily::kMotschTadmor;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = symmetric ? i + 1 : 0; j < n; ++j) {
      const double wij = w[i * n + j];
      if (wij == 0.0) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        const double f = wij * (swarm.velocities[j * dim + c] - swarm.velocities[i * dim + c]);
        out.dv[i * dim + c] += f;
        if (symmetric) out.dv[j * dim + c] -= f;
      }
    }
  }
  return out;
}

SwarmState swarm_step(const SwarmState& state, const KernelSpec& spec, double dt,
                      const AgentOptions& options) {
  const AgentSwarm& s0 = state.swarm;
  const std::size_t n = s0.size();

  std::size_t a = 0, b = 1;
  auto check_floor = [&](const AgentSwarm& s) {
    const double r = min_pair_distance(s, &a, &b);
    if (r < options.r_floor) throw StiffPairDetected(a, b, r);
  };
  check_floor(s0);
  {
    const std::vector<double> w = weight_matrix(s0, spec, options);
    double rate = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double row = std::accumulate(w.begin() + static_cast<std::ptrdiff_t>(i * n),
                                         w.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
      if (row > rate) {
        rate = row;
        worst = i;
      }
    }
    if (dt * rate > options.stability_bound) {
      const auto row = w.begin() + static_cast<std::ptrdiff_t>(worst * n);
      const auto partner = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(n)) - row);
      throw StiffPairDetected(worst, partner,
                              torus_distance(s0.position(worst), s0.position(partner), s0.length));
    }
  }

  auto shifted = [&](const SwarmRhs& k, double h) {
    AgentSwarm s = s0;
    for (std::size_t q = 0; q < s.positions.size(); ++q) {
      s.positions[q] += h * k.dx[q];
      s.velocities[q] += h * k.dv[q];
    }
    s.wrap_positions();
    check_floor(s);
    return s;
  };

  const SwarmRhs k1 = swarm_rhs(s0, spec, options);
  const SwarmRhs k2 = swarm_rhs(shifted(k1, 0.5 * dt), spec, options);
  const SwarmRhs k3 = swarm_rhs(shifted(k2, 0.5 * dt), spec, options);
  const SwarmRhs k4 = swarm_rhs(shifted(k3, dt), spec, options);

  SwarmState next{state.t + dt, s0};
  for (std::size_t q = 0; q < s0.positions.size(); ++q) {
    next.swarm.positions[q] += dt / 6.0 * (k1.dx[q] + 2.0 * k2.dx[q] + 2.0 * k3.dx[q] + k4.dx[q]);
    next.swarm.velocities[q] += dt / 6.0 * (k1.dv[q] + 2.0 * k2.dv[q] + 2.0 * k3.dv[q] + k4.dv[q]);
  }
  next.swarm.wrap_positions();
  check_floor(next.swarm);
  return next;
}

AdvanceResult swarm_advance(const SwarmState& state, const KernelSpec& spec, double dt,
                            const AgentOptions& options, int max_halvings) {
  AdvanceResult out{state, dt, 0};
  for (;;) {
    try {
      out.state = swarm_step(state, spec, out.dt_used, options);
      return out;
    } catch (const StiffPairDetected&) {
      if (out.halvings >= max_halvings) throw;
      out.dt_used *= 0.5;
      ++out.halvings;
    }
  }
}

Connectivity connectivity_graph(const AgentSwarm& swarm, const KernelSpec& spec, double threshold,
                                const AgentOptions& options) {
  const std::size_t n = swarm.size();
  const std::vector<double> w = weight_matrix(swarm, spec, options);
  Connectivity out;
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w[i * n + j] > threshold || w[j * n + i] > threshold) {
        out.edges.emplace_back(i, j);
        uf.unite(i, j);
      }
    }
  }
  out.component.resize(n);
  std::vector<std::size_t> label(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (label[root] == n) label[root] = out.components++;
    out.component[i] = label[root];
  }
  return out;
}

double velocity_diameter(const AgentSwarm& swarm) {
  const auto dim = static_cast<std::size_t>(swarm.dim);
  double best = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      lo = std::min(lo, swarm.velocities[i * dim + c]);
      hi = std::max(hi, swarm.velocities[i * dim + c]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

std::vector<double> total_momentum(const AgentSwarm& swarm) {
  const auto dim = static_cast<std::size_t>(swarm.dim);
  std::vector<double> p(dim, 0.0);
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    for (std::size_t c = 0; c < dim; ++c) p[c] += swarm.velocities[i * dim + c];
  }
  return p;
}

void write_swarm_csv(std::ostream& os, const AgentSwarm& swarm) {
  os << (swarm.dim == 1 ? "i,x,vx\n" : "i,x,y,vx,vy\n");
  std::ostringstream line;
  line.precision(17);
  const auto dim = static_cast<std::size_t>(swarm.dim);
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    line.str("");
    line << i;
    for (std::size_t c = 0; c < dim; ++c) line << ',' << swarm.positions[i * dim + c];
    for (std::size_t c = 0; c < dim; ++c) line << ',' << swarm.velocities[i * dim + c];
    line << '\n';
    os << line.str();
  }
}

std::string to_string(WeightConvention convention) {
  return convention == WeightConvention::kMeanField ? "mean-field" : "raw";
}

WeightConvention weight_convention_from_string(const std::string& name) {
  if (name == "mean-field") return WeightConvention::kMeanField;
  if (name == "raw") return WeightConvention::kRaw;
  throw Error("unknown weight convention '" + name + "'");
}

}  // namespace topoflock
