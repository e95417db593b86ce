#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "topoflock/errors.hpp"
#include "topoflock/spectral.hpp"

using namespace topoflock;

namespace {

DensityField random_density(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> A(-0.3, 0.3);
  const oracle::TrigDensity d{1.0, {{1, A(gen), A(gen)}, {2, A(gen), A(gen)}, {5, 0.2 * A(gen), 0.0}}};
  return DensityField(Grid1D(n), d.samples(n));
}

// Nodal weight for offset k on a uniform density c, including the
// nearest-neighbour scaling of the corrected rule.
double uniform_weight(const KernelSpec& s, double c, double dx, std::size_t k) {
  const double r = k * dx;
  double w = s.amplitude * oracle::cos2_cutoff(r, s.r0) /
             (std::pow(r, 1 + s.alpha - s.effective_tau()) * std::pow(c * r, s.effective_tau()));
  if (k == 1) w *= 1.0 - std::riemann_zeta(s.alpha - 1.0);
  return w;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("quadratic form examples") {
  std::mt19937_64 gen(71);
  const std::size_t n = 96;
  const auto rho = random_density(gen, n);
  KernelSpec s;
  const auto B = assemble_form(rho, s);
  CHECK((B - B.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  CHECK((B * one).cwiseAbs().maxCoeff() <= 1e-13 * B.cwiseAbs().maxCoeff());
  CHECK(std::abs(one.dot(B * one)) <= 1e-12 * B.cwiseAbs().maxCoeff());

  // Direct double sum over the kernel matrix, i outer / j inner.
  KernelMatrix K(rho, s);
  Eigen::VectorXd u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(rho.grid().x(i));
  double direct = 0.0;
  const double dx = rho.grid().dx();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= K.bandwidth(); ++k) {
      const std::size_t a = (i + k) % n, b = (i + n - k) % n;
      direct += 0.5 * K.forward(i, k) * std::pow(u[i] - u[a], 2) * rho[i] * rho[a] * dx * dx;
      direct += 0.5 * K.backward(i, k) * std::pow(u[i] - u[b], 2) * rho[i] * rho[b] * dx * dx;
    }
  }
  CHECK(u.dot(B * u) == doctest::Approx(direct).epsilon(1e-12));
  // adding a constant changes nothing
  const Eigen::VectorXd shifted = u + 3.0 * one;
  CHECK(shifted.dot(B * shifted) == doctest::Approx(u.dot(B * u)).epsilon(1e-10));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("first eigenpair is the constant mode") {
  std::mt19937_64 gen(73);
  const std::size_t n = 64;
  const auto rho = random_density(gen, n);
  const auto B = assemble_form(rho, KernelSpec{});
  Eigen::VectorXd m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = rho[i] * rho.grid().dx();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, m.asDiagonal().toDenseMatrix());
  CHECK(std::abs(es.eigenvalues()[0]) <= 1e-10 * es.eigenvalues()[1]);
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  CHECK((v.array() - v[0]).abs().maxCoeff() <= 1e-8 * std::abs(v[0]));
  const auto rep = lambda2(rho, KernelSpec{});
  CHECK(rep.mu == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-9));
}

TEST_CASE("uniform density matches the circulant symbol") {
  const std::size_t n = 256;
  Grid1D g(n);
  for (auto fam : {KernelFamily::kGeometric, KernelFamily::kTopological}) {
    for (double c : {1.0, 2.5}) {
      KernelSpec s;
      s.family = fam;
      DensityField rho(g, std::vector<double>(n, c));
      const double symbol = oracle::circulant_symbol(1, n, g.length(), [&](std::size_t k) {
        return uniform_weight(s, c, g.dx(), k);
      });
      const auto rep = lambda2(rho, s);
      CHECK(rep.mu == doctest::Approx(c * symbol).epsilon(1e-8));
      CHECK(rep.lambda2 == doctest::Approx(2 * c * symbol).epsilon(1e-8));
    }
  }
}

TEST_CASE("uniform rescaling multiplies lambda2 by c^(1 - tau)") {
  const std::size_t n = 128;
  Grid1D g(n);
  for (double tau : {0.0, 1.0, 2.0}) {
    KernelSpec s;
    s.tau = tau;
    const double base = lambda2(DensityField(g, std::vector<double>(n, 1.0)), s).lambda2;
    for (double c : {0.5, 3.0}) {
      const double scaled = lambda2(DensityField(g, std::vector<double>(n, c)), s).lambda2;
      CHECK(scaled == doctest::Approx(std::pow(c, 1 - tau) * base).epsilon(1e-9));
    }
  }
}

TEST_CASE("gap is positive with an orthogonal second eigenvector") {
  std::mt19937_64 gen(79);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = random_density(gen, 48 + 16 * trial);
    for (auto fam : {KernelFamily::kTopological, KernelFamily::kGeometric, KernelFamily::kMotschTadmor}) {
      KernelSpec s;
      s.family = fam;
      const auto rep = lambda2(rho, s);
      REQUIRE(rep.lambda2 > 0.0);
      REQUIRE(rep.residual <= 1e-8);
      REQUIRE(rep.quotient_check == doctest::Approx(rep.mu).epsilon(1e-8));
      double dot = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        dot += rep.eigvec2[i] * rho[i] * rho.grid().dx();
        norm += rep.eigvec2[i] * rep.eigvec2[i] * rho[i] * rho.grid().dx();
      }
      REQUIRE(std::abs(dot) <= 1e-10 * std::sqrt(norm * rho.total_mass()));
    }
  }
}

TEST_CASE("dense solve is capped") {
  Grid1D g(2050);
  CHECK_THROWS_AS(lambda2(DensityField(g, std::vector<double>(2050, 1.0)), KernelSpec{}), EigSolverFailure);
}

TEST_CASE("decay bound check") {
  const std::vector<double> t0{0.0}, v0{1.0}, l0{2.0};
  auto one = check_decay_bound(t0, v0, l0, 0.05);
  CHECK(one.holds);
  CHECK(one.worst_slack == 0.0);

  const std::vector<double> t{0.0, 0.5, 1.0}, zero{0.0, 0.0, 0.0}, lam{1.0, 1.0, 1.0};
  CHECK(check_decay_bound(t, zero, lam, 0.05).holds);

  // V2 = exp(-1.02 t) against lambda2 = 1: holds with room.
  const std::vector<double> v{1.0, std::exp(-0.51), std::exp(-1.02)};
  const auto ok = check_decay_bound(t, v, lam, 0.05);
  CHECK(ok.holds);
  CHECK(ok.worst_slack <= 0.0);
  const std::vector<double> bad{1.0, std::exp(-0.3), std::exp(-0.6)};
  CHECK_FALSE(check_decay_bound(t, bad, lam, 0.05).holds);
}

}  // TEST_SUITE
