#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "topoflock/agents.hpp"
#include "topoflock/errors.hpp"

using namespace topoflock;

namespace {

const double kL = 2 * std::numbers::pi;

AgentSwarm random_swarm(std::mt19937_64& gen, std::size_t n, int dim) {
  std::uniform_real_distribution<double> U(0.0, kL), V(-1.0, 1.0);
  std::vector<double> x(n * dim), v(n * dim);
  for (double& p : x) p = U(gen);
  for (double& w : v) w = V(gen);
  return AgentSwarm(dim, kL, x, v);
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("aligned velocities are a fixed point and translate rigidly") {
  std::mt19937_64 gen(53);
  auto s = random_swarm(gen, 20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    s.velocities[2 * i] = 0.4;
    s.velocities[2 * i + 1] = -0.1;
  }
  const auto r = swarm_rhs(s, KernelSpec{});
  for (double dv : r.dv) CHECK(dv == 0.0);
  const auto next = swarm_step({0.0, s}, KernelSpec{}, 0.5);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(torus_distance(next.swarm.positions[2 * i], s.positions[2 * i] + 0.2, kL) < 1e-13);
    CHECK(torus_distance(next.swarm.positions[2 * i + 1], s.positions[2 * i + 1] - 0.05, kL) < 1e-13);
    CHECK(next.swarm.velocities[2 * i] == 0.4);
  }
}

TEST_CASE("two agents") {
  // N = 2, dim 1: d_N = 2/2 = 1, so phi = h / (r^(1+alpha-tau) d^tau) = 1/r and
  // the mean-field weight halves it.
  KernelSpec spec;
  spec.alpha = 1.0;
  spec.tau = 1.0;
  const double r = 0.3, v1 = 0.2, v2 = -0.7;
  AgentSwarm s(1, kL, {1.0, 1.0 + r}, {v1, v2});
  const auto out = swarm_rhs(s, spec);
  CHECK(out.dv[0] == doctest::Approx(0.5 * (1.0 / r) * (v2 - v1)).epsilon(1e-12));
  CHECK(out.dv[1] == doctest::Approx(-out.dv[0]).epsilon(1e-14));
  AgentOptions raw;
  raw.convention = WeightConvention::kRaw;
  CHECK(swarm_rhs(s, spec, raw).dv[0] == doctest::Approx((1.0 / r) * (v2 - v1)).epsilon(1e-12));
}

TEST_CASE("pair forces cancel") {
  std::mt19937_64 gen(59);
  for (int dim = 1; dim <= 2; ++dim) {
    for (auto fam : {KernelFamily::kTopological, KernelFamily::kGeometric}) {
      for (int trial = 0; trial < 10; ++trial) {
        auto s = random_swarm(gen, 40, dim);
        KernelSpec spec;
        spec.family = fam;
        const auto r = swarm_rhs(s, spec);
        for (int c = 0; c < dim; ++c) {
          double sum = 0.0, scale = 0.0;
          for (std::size_t i = 0; i < 40; ++i) {
            sum += r.dv[dim * i + c];
            scale = std::max(scale, std::abs(r.dv[dim * i + c]));
          }
          REQUIRE(std::abs(sum) <= 1e-13 * std::max(1.0, scale));
        }
        const auto W = weight_matrix(s, spec);
        for (std::size_t i = 0; i < 40; ++i) {
          for (std::size_t j = 0; j < 40; ++j) REQUIRE(W[i * 40 + j] == W[j * 40 + i]);
        }
      }
    }
  }
}

TEST_CASE("swarm flocks and conserves momentum") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> U(0.0, kL);
  const std::size_t n = 64;
  std::vector<double> x(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = U(gen);
    v[i] = std::sin(x[i]);
  }
  SwarmState st{0.0, AgentSwarm(1, kL, x, v)};
  const KernelSpec spec;
  const double d0 = velocity_diameter(st.swarm);
  const double p0 = total_momentum(st.swarm)[0];
  double vmax = *std::max_element(v.begin(), v.end()), vmin = *std::min_element(v.begin(), v.end());
  while (st.t < 5.0 - 1e-12) {
    auto adv = swarm_advance(st, spec, 0.01);
    const auto& nv = adv.state.swarm.velocities;
    const double nmax = *std::max_element(nv.begin(), nv.end()), nmin = *std::min_element(nv.begin(), nv.end());
    REQUIRE(nmax <= vmax + 1e-9);
    REQUIRE(nmin >= vmin - 1e-9);
    vmax = nmax;
    vmin = nmin;
    st = adv.state;
  }
  CHECK(velocity_diameter(st.swarm) < d0);
  CHECK(std::abs(total_momentum(st.swarm)[0] - p0) <= 1e-9 * n);
}

TEST_CASE("near collisions are rejected and retried with a smaller step") {
  // Negligible alignment, so the pair coasts into each other: the midpoint
  // stage of a 0.1 step lands on the collision, a 0.025 step stays clear.
  KernelSpec spec;
  spec.family = KernelFamily::kGeometric;
  spec.amplitude = 1e-9;
  AgentOptions opt;
  opt.r_floor = 1e-3;
  AgentSwarm s(1, kL, {1.0, 1.1, 4.0}, {1.0, -1.0, 0.0});
  CHECK_THROWS_AS(swarm_step({0.0, s}, spec, 0.1, opt), StiffPairDetected);
  const auto adv = swarm_advance({0.0, s}, spec, 0.1, opt);
  CHECK(adv.halvings == 2);
  CHECK(adv.dt_used == 0.025);
  CHECK(adv.state.t == doctest::Approx(adv.dt_used));
  CHECK(torus_distance(adv.state.swarm.positions[0], adv.state.swarm.positions[1], kL) >= opt.r_floor);

  AgentSwarm touching(1, kL, {1.0, 1.0 + 1e-5}, {0.0, 0.0});
  try {
    swarm_step({0.0, touching}, spec, 0.01, opt);
    FAIL("expected StiffPairDetected");
  } catch (const StiffPairDetected& e) {
    CHECK(e.distance() < opt.r_floor);
  }
}

TEST_CASE("connectivity examples") {
  KernelSpec spec;
  AgentSwarm cluster(2, kL, {1.0, 1.0, 1.2, 1.1, 0.9, 1.3, 1.1, 0.8}, std::vector<double>(8, 0.0));
  CHECK(connectivity_graph(cluster, spec).components == 1);

  // 2 r0 = 2; the gaps between the clusters are 2.8 and 2 pi - 3.1.
  spec.r0 = 1.0;
  AgentSwarm two(1, kL, {0.0, 0.1, 0.2, 3.0, 3.1}, std::vector<double>(5, 0.0));
  const auto c = connectivity_graph(two, spec);
  CHECK(c.components == 2);
  CHECK(c.component[0] == c.component[2]);
  CHECK(c.component[0] != c.component[3]);
}

TEST_CASE("connectivity matches breadth-first search") {
  std::mt19937_64 gen(67);
  std::uniform_real_distribution<double> R0(0.1, 0.6);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 2;
    auto s = random_swarm(gen, 30, dim);
    KernelSpec spec;
    spec.r0 = R0(gen);
    if (trial % 3 == 0) spec.family = KernelFamily::kMotschTadmor;
    const double reach = spec.family == KernelFamily::kMotschTadmor ? spec.r0 : 2 * spec.r0;
    const auto got = connectivity_graph(s, spec);
    const auto expect = oracle::bfs_components(30, [&](std::size_t a, std::size_t b) {
      double sq = 0.0;
      for (int k = 0; k < dim; ++k) sq += std::pow(oracle::circle_distance(s.positions[dim * a + k], s.positions[dim * b + k], kL), 2);
      return std::sqrt(sq) < reach;
    });
    REQUIRE(got.components == expect);
  }
}

TEST_CASE("swarm CSV layout") {
  AgentSwarm s(2, kL, {1.0, 2.0, 3.0, 4.0}, {0.5, 0.25, -1.0, 0.0});
  std::ostringstream os;
  write_swarm_csv(os, s);
  CHECK(os.str().rfind("i,x,y,vx,vy\n", 0) == 0);
  CHECK(weight_convention_from_string(to_string(WeightConvention::kRaw)) == WeightConvention::kRaw);
}

}  // TEST_SUITE
