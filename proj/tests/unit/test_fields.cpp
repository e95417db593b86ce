#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "topoflock/errors.hpp"
#include "topoflock/fields.hpp"

using namespace topoflock;

TEST_SUITE("fields") {

TEST_CASE("torus distance examples") {
  const double L = 2 * std::numbers::pi;
  // shorter way round: 2pi - 6.1
  CHECK(torus_distance(0.1, 6.2, L) == doctest::Approx(std::min(6.1, L - 6.1)).epsilon(1e-14));
  CHECK(torus_distance(0.1, 6.2, L) == doctest::Approx(0.18318530717958623).epsilon(1e-12));
  CHECK(torus_distance(1.3, 1.3, L) == 0.0);
  CHECK(torus_distance(0.0, std::numbers::pi, L) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("torus distance is a metric on random triples") {
  std::mt19937_64 gen(7);
  const double L = 2 * std::numbers::pi;
  std::uniform_real_distribution<double> U(-3 * L, 3 * L);
  for (int dim = 1; dim <= 2; ++dim) {
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<double> a(dim), b(dim), c(dim);
      for (int k = 0; k < dim; ++k) {
        a[k] = U(gen);
        b[k] = U(gen);
        c[k] = U(gen);
      }
      const double ab = torus_distance(a, b, L), ba = torus_distance(b, a, L);
      const double ac = torus_distance(a, c, L), cb = torus_distance(c, b, L);
      REQUIRE(ab == ba);
      REQUIRE(ab <= ac + cb + 1e-12);
      REQUIRE(ab <= L * std::sqrt(static_cast<double>(dim)) / 2 + 1e-12);
      if (dim == 1) REQUIRE(ab == doctest::Approx(oracle::circle_distance(a[0], b[0], L)).epsilon(1e-12));
    }
  }
}

TEST_CASE("grid validation and wrapping") {
  CHECK_THROWS_AS(Grid1D(7), Error);
  Grid1D g(8);
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(8) == 0);
  CHECK(g.wrap(-17) == 7);
  CHECK(g.wrap_position(-0.5) == doctest::Approx(g.length() - 0.5));
}

TEST_CASE("initial data examples") {
  Grid1D g(256);
  InitialDataSpec uni;
  uni.kind = InitialKind::kUniform;
  auto [r0, u0] = build_initial_data(g, uni);
  CHECK(r0.min() == 1.0);
  CHECK(r0.max() == 1.0);
  CHECK(u0.diameter() == 0.0);

  InitialDataSpec sine;  // a = 0.5, k = 1, b = 1, m = 1
  auto [r1, u1] = build_initial_data(g, sine);
  double scan = 1e300;
  for (std::size_t i = 0; i < g.size(); ++i) scan = std::min(scan, 1 + 0.5 * std::sin(g.x(i)));
  CHECK(r1.min() == doctest::Approx(scan).epsilon(1e-15));
  CHECK(r1.min() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u1.max() == doctest::Approx(1.0));

  sine.amp = 1.2;
  CHECK_THROWS_AS(build_initial_data(g, sine), NonPositiveDensity);
}

TEST_CASE("prefix mass matches a fresh recomputation") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Grid1D g(8 + trial * 13);
    std::vector<double> v(g.size());
    for (double& x : v) x = U(gen);
    DensityField rho(g, v);
    const auto prefix = rho.prefix_mass();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(std::abs(prefix[i] - acc) <= 1e-14 * rho.total_mass());
      REQUIRE(prefix[i + 1] >= prefix[i]);
      acc += g.dx() * v[i];
    }
    REQUIRE(std::abs(rho.total_mass() - acc) <= 1e-14 * rho.total_mass());
  }
}

TEST_CASE("density rejects non-positive values") {
  Grid1D g(8);
  std::vector<double> v(8, 1.0);
  v[3] = 0.0;
  try {
    DensityField rho(g, v);
    FAIL("expected NonPositiveDensity");
  } catch (const NonPositiveDensity& e) {
    CHECK(e.cell() == 3);
  }
}

TEST_CASE("momentum is consistent with its generating pair") {
  Grid1D g(32);
  auto [rho, u] = build_initial_data(g, InitialDataSpec{});
  const auto m = MomentumField::from(rho, u);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(m.values[i] == rho[i] * u.values[i]);
}

TEST_CASE("swarm wraps positions and checks shapes") {
  const double L = 2 * std::numbers::pi;
  AgentSwarm s(1, L, {-0.5, L + 0.25}, {0.0, 0.0});
  CHECK(s.positions[0] == doctest::Approx(L - 0.5));
  CHECK(s.positions[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(AgentSwarm(1, L, {0.0}, {0.0}), Error);
  CHECK_THROWS_AS(AgentSwarm(2, L, {0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), Error);
  CHECK_THROWS_AS(AgentSwarm(3, L, {0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}), Error);
}

TEST_CASE("field CSV round trip") {
  Grid1D g(16);
  auto [rho, u] = build_initial_data(g, InitialDataSpec{});
  std::stringstream ss;
  write_fields_csv(ss, rho, u);
  CHECK(ss.str().rfind("i,x,rho,u\n", 0) == 0);
  auto [r2, u2] = read_fields_csv(ss);
  REQUIRE(r2.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(r2[i] == rho[i]);
    CHECK(u2[i] == u.values[i]);
  }
}

}  // TEST_SUITE
