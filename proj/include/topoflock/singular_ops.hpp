#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "topoflock/fields.hpp"
#include "topoflock/kernels.hpp"
#include "topoflock/spectral_derivative.hpp"

namespace topoflock {

/// kPunctured: plain rectangle rule over nonzero grid offsets.
/// kCorrected: same, with the nearest-neighbour weights scaled by
/// 1 - zeta(alpha - 1), which removes the leading h^(2-alpha) error of the
/// punctured sum while keeping the weight matrix symmetric.
enum class Quadrature { kPunctured, kCorrected };

std::string to_string(Quadrature quadrature);
Quadrature quadrature_from_string(const std::string& name);

struct OperatorOptions {
  double r = 0.0;  // Taylor-correction radius; 0 selects the default
  // Ignored when a prebuilt KernelMatrix is passed.
  Quadrature quadrature = Quadrature::kCorrected;
  DerivativeMethod derivative = DerivativeMethod::kSpectral;
};

struct OperatorEval {
  std::vector<double> values;
  std::vector<double> b;  // b_r
  std::vector<double> a;  // a_r, commutator only
  double drift_used = 0.0;
  Quadrature quadrature = Quadrature::kCorrected;
};

// 1 - zeta(alpha - 1); equals 1 for the punctured rule.
double near_field_factor(double alpha, Quadrature quadrature);

// max(4 dx, r0 / 8) capped by r0, snapped to a multiple of dx.
double default_radius(const Grid1D& grid, const KernelSpec& spec);

// Validates a requested radius (0 means default). Throws RadiusOutOfRange.
double resolve_radius(const Grid1D& grid, const KernelSpec& spec, double r);

/// Banded kernel weights phi(x_i, x_{i+k}) for 0 < |k| <= bandwidth().
/// Distances between nodes are trapezoid masses, computed once per unordered
/// pair, so symmetric families give an exactly symmetric matrix.
class KernelMatrix {
 public:
  KernelMatrix(const DensityField& rho, const KernelSpec& spec,
               Quadrature quadrature = Quadrature::kCorrected);

  std::size_t size() const { return n_; }
  const Grid1D& grid() const { return grid_; }
  const KernelSpec& spec() const { return spec_; }
  std::size_t bandwidth() const { return band_; }
  double dx() const { return dx_; }
  bool symmetric() const { return symmetric_; }
  Quadrature quadrature() const { return quadrature_; }

  // phi(x_i, x_{i+k}) and phi(x_i, x_{i-k}) for 1 <= k <= bandwidth().
  double forward(std::size_t i, std::size_t k) const { return fwd_[i * band_ + k - 1]; }
  double backward(std::size_t i, std::size_t k) const {
    if (symmetric_) return fwd_[(i >= k ? i - k : i + n_ - k) * band_ + k - 1];
    return bwd_[i * band_ + k - 1];
  }

  // Sum over neighbours of phi_ik rho_{i+k} dx.
  std::vector<double> weighted_row_sums(std::span<const double> rho) const;

 private:
  Grid1D grid_;
  KernelSpec spec_;
  std::size_t n_;
  std::size_t band_;
  double dx_;
  bool symmetric_;
  Quadrature quadrature_;
  std::vector<double> fwd_;
  std::vector<double> bwd_;  // only for non-symmetric families
};

OperatorEval eval_Lphi(std::span<const double> f, const DensityField& rho, const KernelSpec& spec,
                       const OperatorOptions& options = {});
OperatorEval eval_Lphi(std::span<const double> f, const KernelMatrix& kernel,
                       const OperatorOptions& options = {});

OperatorEval eval_commutator(const DensityField& rho, std::span<const double> f,
                             const KernelSpec& spec, const OperatorOptions& options = {});
OperatorEval eval_commutator(const DensityField& rho, std::span<const double> f,
                             const KernelMatrix& kernel, const OperatorOptions& options = {});

// rho_i * C(rho, u)_i accumulated pair by pair so that the sum over cells
// cancels for symmetric kernels.
std::vector<double> alignment_source(const KernelMatrix& kernel, std::span<const double> rho,
                                     std::span<const double> u);

/// d/dx of the kernel along the diagonal direction:
/// -tau h(|z|) / (|z|^(1+alpha-tau) d^(tau+1)) (rho(x+z) - rho(x)) sgn z,
/// with z = k dx and d the node distance. Throws SingularEvaluation for k = 0.
double eval_phi_prime_kernel(const DensityField& rho, const KernelSpec& spec, std::size_t i,
                             std::ptrdiff_t k);

// Sum over offsets of (f_{i+k} - f_i) phi'_ik dx.
std::vector<double> eval_Lphi_prime(std::span<const double> f, const DensityField& rho,
                                    const KernelSpec& spec, Quadrature quadrature = Quadrature::kCorrected);

// Sum over offsets of |f_{i+k} - f_i|^2 h(|z|) / |z|^(1+alpha) dx.
std::vector<double> enstrophy_density(std::span<const double> f, const Grid1D& grid,
                                      const KernelSpec& spec,
                                      Quadrature quadrature = Quadrature::kCorrected);

}  // namespace topoflock
