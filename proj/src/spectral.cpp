#include "topoflock/spectral.hpp"

#include <cmath>

#include "topoflock/errors.hpp"

namespace topoflock {

Eigen::MatrixXd assemble_form(const KernelMatrix& kernel, std::span<const double> rho) {
  const std::size_t n = kernel.size();
  const double dx2 = kernel.dx() * kernel.dx();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
      const std::size_t j = (i + k) % n;
      const double w = 0.5 * (kernel.forward(i, k) + kernel.backward(j, k)) * rho[i] * rho[j] * dx2;
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      B(a, b) -= w;
      B(b, a) -= w;
      B(a, a) += w;
      B(b, b) += w;
    }
  }
  return B;
}

Eigen::MatrixXd assemble_form(const DensityField& rho, const KernelSpec& spec, Quadrature quadrature) {
  return assemble_form(KernelMatrix(rho, spec, quadrature), rho.values());
}

SpectralReport lambda2(const DensityField& rho, const KernelSpec& spec, Quadrature quadrature) {
  const auto n = static_cast<Eigen::Index>(rho.size());
  if (n > 2048) throw EigSolverFailure("dense spectral solve is limited to 2048 cells");
  const Eigen::MatrixXd B = assemble_form(rho, spec, quadrature);
  Eigen::VectorXd mass(n), inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mass(i) = rho[static_cast<std::size_t>(i)] * rho.grid().dx();
    inv_sqrt(i) = 1.0 / std::sqrt(mass(i));
  }
  const Eigen::MatrixXd A = inv_sqrt.asDiagonal() * B * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw EigSolverFailure("eigensolver did not converge");

  SpectralReport report;
  report.mu = solver.eigenvalues()(1);
  report.lambda2 = 2.0 * report.mu;
  Eigen::VectorXd w = inv_sqrt.asDiagonal() * solver.eigenvectors().col(1);
  // Remove the rounding-level component along constants in the rho-weighted product.
  w.array() -= w.dot(mass) / mass.sum();
  const Eigen::VectorXd Bw = B * w;
  report.quotient_check = w.dot(Bw) / w.dot(mass.asDiagonal() * w);
  const double bw_norm = Bw.norm();
  report.residual = bw_norm > 0.0 ? (Bw - report.mu * (mass.asDiagonal() * w)).norm() / bw_norm : 0.0;
  if (!(report.residual <= 1e-8)) {
    throw EigSolverFailure("generalized eigenpair residual " + std::to_string(report.residual));
  }
  report.eigvec2.assign(w.data(), w.data() + n);
  return report;
}

DecayCheck check_decay_bound(std::span<const double> times, std::span<const double> V2,
                             std::span<const double> lambda2, double tolerance) {
  DecayCheck out;
  if (times.empty() || V2[0] == 0.0) return out;
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    integral += 0.5 * (times[i] - times[i - 1]) * (lambda2[i] + lambda2[i - 1]);
    const double bound = V2[0] * std::exp(-integral);
    out.worst_slack = std::max(out.worst_slack, V2[i] / bound - 1.0);
  }
  out.holds = out.worst_slack <= tolerance;
  return out;
}

}  // namespace topoflock
