#pragma once

#include <functional>
#include <string>
#include <vector>

#include "topoflock/fields.hpp"
#include "topoflock/kernels.hpp"
#include "topoflock/singular_ops.hpp"

namespace topoflock {

struct HydroState {
  double t = 0.0;
  DensityField rho;
  MomentumField m;

  static HydroState from(double t, const DensityField& rho, const VelocityField& u);
  VelocityField u() const;
  const Grid1D& grid() const { return rho.grid(); }
};

struct HydroOptions {
  double cfl = 0.4;
  Quadrature quadrature = Quadrature::kCorrected;
  DerivativeMethod derivative = DerivativeMethod::kSpectral;
  bool second_order = true;  // MUSCL reconstruction; false gives first-order upwinding
};

struct HydroRhs {
  std::vector<double> drho;
  std::vector<double> dm;
};

/// Conservative semi-discretization: local Lax-Friedrichs fluxes for
/// (rho u, rho u^2) plus the alignment source rho C(rho, u).
HydroRhs rhs(const HydroState& state, const KernelSpec& spec, const HydroOptions& options = {});
HydroRhs rhs(const HydroState& state, const KernelMatrix& kernel, const HydroOptions& options = {});

// cfl * min(dx / max|u|, 1 / (2 max_i sum_k phi_ik rho_{i+k} dx)).
double stable_dt(const HydroState& state, const KernelSpec& spec, const HydroOptions& options = {});
double stable_dt(const HydroState& state, const KernelMatrix& kernel, const HydroOptions& options = {});

/// One SSP-RK3 step. Throws CflViolation when dt exceeds stable_dt and
/// PositivityLoss when a stage produces a non-positive density.
HydroState step(const HydroState& state, const KernelSpec& spec, double dt,
                const HydroOptions& options = {});

struct EQuantity {
  std::vector<double> e;   // u_x + L rho
  std::vector<double> q;   // e / rho
  std::vector<double> q1;  // q_x / rho
};

EQuantity compute_e(const HydroState& state, const KernelSpec& spec, const HydroOptions& options = {});

// Velocity with u_x = -L rho and mean u_bar, so that e vanishes initially.
std::vector<double> e0_free_velocity(const DensityField& rho, const KernelSpec& spec, double u_bar,
                                     const HydroOptions& options = {});

struct Smallness {
  double ratio = 0.0;  // M0 max|q0| (1 - alpha) / r0^(1 - alpha); < 1 means the condition holds
  bool unconditional = false;  // alpha >= 1
};

Smallness check_smallness(const HydroState& state, const KernelSpec& spec,
                          const HydroOptions& options = {});

struct HydroRunOptions {
  double t_final = 10.0;
  double output_interval = 0.5;
  HydroOptions numerics;
};

struct HydroRunResult {
  HydroState final_state;
  std::string termination = "completed";
  std::size_t steps = 0;
};

using HydroOutputObserver = std::function<void(const HydroState&)>;
using HydroStepObserver = std::function<void(const HydroState& before, const HydroState& after)>;

/// Integrates to t_final with the largest stable step, landing exactly on
/// output times. Runtime errors end the run and are named in `termination`.
HydroRunResult integrate(const HydroState& initial, const KernelSpec& spec,
                         const HydroRunOptions& options, const HydroOutputObserver& on_output,
                         const HydroStepObserver& on_step = {});

}  // namespace topoflock
