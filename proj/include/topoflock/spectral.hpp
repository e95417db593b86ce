#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "topoflock/fields.hpp"
#include "topoflock/kernels.hpp"
#include "topoflock/singular_ops.hpp"

namespace topoflock {

/// Dense symmetric B with u^T B u = 1/2 sum_ij phi_ij (u_i - u_j)^2 rho_i rho_j dx^2.
/// Non-symmetric kernels are symmetrized first.
Eigen::MatrixXd assemble_form(const KernelMatrix& kernel, std::span<const double> rho);
Eigen::MatrixXd assemble_form(const DensityField& rho, const KernelSpec& spec,
                              Quadrature quadrature = Quadrature::kCorrected);

struct SpectralReport {
  // Decay rate for V2: dV2/dt <= -lambda2 V2 under pure alignment. Equals 2 mu.
  double lambda2 = 0.0;
  // Second-smallest eigenvalue of B w = mu M w, M = diag(rho_i dx).
  double mu = 0.0;
  std::vector<double> eigvec2;
  double quotient_check = 0.0;  // Rayleigh quotient of eigvec2
  double residual = 0.0;        // |B w - mu M w| / |B w|
};

// Throws EigSolverFailure when the solve fails or the residual check does not hold.
SpectralReport lambda2(const DensityField& rho, const KernelSpec& spec,
                       Quadrature quadrature = Quadrature::kCorrected);

struct DecayCheck {
  double worst_slack = 0.0;  // max over rows of V2(t) / (V2(0) exp(-int lambda2)) - 1
  bool holds = true;
};

DecayCheck check_decay_bound(std::span<const double> times, std::span<const double> V2,
                             std::span<const double> lambda2, double tolerance);

}  // namespace topoflock
