#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "topoflock/fields.hpp"
#include "topoflock/kernels.hpp"
#include "topoflock/singular_ops.hpp"

namespace topoflock {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double V2 = 0.0;
  double u_diam = 0.0;
  double q_max = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double campanato = 0.0;
  double eta = 0.0;
  double enstrophy = 0.0;
  double flatten_plus = 0.0;
  double flatten_minus = 0.0;
};

// Column order of the diagnostics CSV.
const std::vector<std::string>& diagnostics_columns();
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& record);

// 1/2 sum rho u^2 dx.
double kinetic_energy(const DensityField& rho, std::span<const double> u);

// sum_ij (u_i - u_j)^2 rho_i rho_j dx^2, evaluated through the variance
// identity 2 M0 sum (u - ubar)^2 rho dx.
double fluctuation_V2(const DensityField& rho, std::span<const double> u);

// 1/2 sum_ij phi_ij (u_i - u_j)^2 rho_i rho_j dx^2 (symmetrized weights).
double discrete_enstrophy(const KernelMatrix& kernel, std::span<const double> rho,
                          std::span<const double> u);

/// Largest value over grid centers x* and radii r of
///   int_{|x - x*| < r/10} |u - u_{x*,r}|^2 rho dx,
/// with u_{x*,r} the rho-weighted average of u over B(x*, r). Integrals are
/// exact for piecewise-constant rho and piecewise-linear u.
double campanato_seminorm(const DensityField& rho, std::span<const double> u,
                          std::span<const double> radii);

// Windowed deviation for a single center and radius.
double campanato_term(const DensityField& rho, std::span<const double> u, double center, double r);

std::vector<double> default_campanato_radii(double r0);

enum class FlattenSign { kPlus, kMinus };

/// Mass fraction of {u < u+(1 - delta)} (kPlus) or {u > u-(1 + delta)} (kMinus)
/// inside B(x+-, r0), where x+- is the arg-max/arg-min cell. u is shifted by
/// `lift` first; callers pick the lift so that u + lift > 0.
double flattening_expectation(const DensityField& rho, std::span<const double> u, double delta,
                              FlattenSign sign, double r0, double lift = 0.0);

// Shift that makes min(u + lift) equal to the velocity diameter (1 if u is flat).
double default_lift(std::span<const double> u);

// 1 / sqrt(t ln t) clamped to [1e-3, 1]; 1 while t ln t <= 1.
double flattening_delta(double t);

// Trapezoid integral of rho_min^2 over the samples.
double eta_clock(std::span<const double> times, std::span<const double> rho_min);

struct RootLogFit {
  double C = 0.0;          // smallest C with u_diam(t) <= C / sqrt(ln t) over t > e
  std::size_t samples = 0;
};

RootLogFit fit_root_log(std::span<const double> times, std::span<const double> u_diam);

}  // namespace topoflock
