#include "topoflock/singular_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoflock/errors.hpp"
#include "topoflock/geometry.hpp"

namespace topoflock {

namespace {

std::size_t band_for(const Grid1D& grid, double support) {
  const auto reach = static_cast<std::size_t>(std::floor(support / grid.dx() * (1.0 + 1e-12)));
  return std::max<std::size_t>(1, std::min(reach, (grid.size() - 1) / 2));
}

double inverse_power(double d, double tau) {
  if (tau == 1.0) return 1.0 / d;
  if (tau == 2.0) return 1.0 / (d * d);
  return std::pow(d, -tau);
}

void check_same_grid(std::size_t n, std::size_t m) {
  if (n != m) throw Error("field size does not match the kernel grid");
}

}  // namespace

std::string to_string(Quadrature quadrature) {
  return quadrature == Quadrature::kCorrected ? "corrected" : "punctured";
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "corrected") return Quadrature::kCorrected;
  if (name == "punctured") return Quadrature::kPunctured;
  throw Error("unknown quadrature '" + name + "'");
}

double near_field_factor(double alpha, Quadrature quadrature) {
  if (quadrature == Quadrature::kPunctured) return 1.0;
  // zeta is expensive and alpha rarely changes within a thread.
  thread_local double cached_alpha = std::numeric_limits<double>::quiet_NaN();
  thread_local double cached_factor = 1.0;
  if (alpha != cached_alpha) {
    cached_factor = 1.0 - std::riemann_zeta(alpha - 1.0);
    cached_alpha = alpha;
  }
  return cached_factor;
}

double default_radius(const Grid1D& grid, const KernelSpec& spec) {
  const double dx = grid.dx();
  const double target = std::min(std::max(4.0 * dx, spec.r0 / 8.0), spec.r0);
  const double steps = std::max(1.0, std::floor(target / dx + 0.5));
  double r = steps * dx;
  if (r > spec.r0) r = std::max(1.0, std::floor(spec.r0 / dx)) * dx;
  return r;
}

double resolve_radius(const Grid1D& grid, const KernelSpec& spec, double r) {
  if (r == 0.0) return default_radius(grid, spec);
  const double dx = grid.dx();
  const double steps = r / dx;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    throw RadiusOutOfRange("radius must be a multiple of the grid spacing");
  }
  if (rounded < 1.0 || r > spec.r0 * (1.0 + 1e-12)) {
    throw RadiusOutOfRange("radius must lie in [dx, r0]");
  }
  return rounded * dx;
}

KernelMatrix::KernelMatrix(const DensityField& rho, const KernelSpec& spec, Quadrature quadrature)
    : grid_(rho.grid()),
      spec_(spec),
      n_(rho.size()),
      band_(band_for(rho.grid(), spec.support())),
      dx_(rho.grid().dx()),
      symmetric_(spec.family != KernelFamily::kMotschTadmor),
      quadrature_(quadrature),
      fwd_(n_ * band_) {
  const Grid1D& grid = rho.grid();
  if (spec.family == KernelFamily::kMotschTadmor) {
    bwd_.resize(n_ * band_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double ball = mass_of_ball(rho, grid.x(i), spec.r0);
      for (std::size_t k = 1; k <= band_; ++k) {
        const double w = eval_phi(spec, static_cast<double>(k) * dx_, ball);
        fwd_[i * band_ + k - 1] = w;
        bwd_[i * band_ + k - 1] = w;
      }
    }
    return;
  }

  // Distance-free part per offset; the density enters through d^tau only.
  const double tau = spec.effective_tau();
  std::vector<double> base(band_);
  for (std::size_t k = 1; k <= band_; ++k) {
    const double r = static_cast<double>(k) * dx_;
    const double h = eval_h(spec.profile(), r);
    base[k - 1] = h == 0.0 ? 0.0 : spec.amplitude * h / std::pow(r, 1.0 + spec.alpha - tau);
  }
  base[0] *= near_field_factor(spec.alpha, quadrature);

  // Node cumulative masses; the same differences as topo_distance_nodes.
  std::vector<double> node(2 * n_);
  for (std::size_t j = 0; j < 2 * n_; ++j) node[j] = rho.node_cumulative(static_cast<std::ptrdiff_t>(j));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 1; k <= band_; ++k) {
      double w = base[k - 1];
      if (w != 0.0 && tau != 0.0) w *= inverse_power(node[i + k] - node[i], tau);
      fwd_[i * band_ + k - 1] = w;
    }
  }
}

std::vector<double> KernelMatrix::weighted_row_sums(std::span<const double> rho) const {
  check_same_grid(n_, rho.size());
  std::vector<double> out(n_, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= band_; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const auto ii = static_cast<std::ptrdiff_t>(i);
      s += forward(i, k) * rho[static_cast<std::size_t>((ii + kk) % n)] +
           backward(i, k) * rho[static_cast<std::size_t>((ii - kk + n) % n)];
    }
    out[i] = s * dx_;
  }
  return out;
}

OperatorEval eval_Lphi(std::span<const double> f, const KernelMatrix& kernel,
                       const OperatorOptions& options) {
  const std::size_t n = kernel.size();
  check_same_grid(n, f.size());
  const double dx = kernel.dx();
  const Grid1D& grid = kernel.grid();
  const double r = resolve_radius(grid, kernel.spec(), options.r);
  const auto taylor = static_cast<std::size_t>(std::llround(r / dx));
  const std::vector<double> fp = derivative(f, grid.length(), options.derivative);

  OperatorEval out;
  out.values.assign(n, 0.0);
  out.b.assign(n, 0.0);
  out.drift_used = r;
  out.quadrature = kernel.quadrature();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    double drift = 0.0;
    for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
      const double wf = kernel.forward(i, k);
      const double wb = kernel.backward(i, k);
      const double fi = f[i];
      sum += (f[grid.wrap(static_cast<std::ptrdiff_t>(i + k))] - fi) * wf +
             (f[grid.wrap(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(k))] - fi) * wb;
      if (k < taylor) drift += static_cast<double>(k) * dx * (wf - wb);
    }
    sum *= dx;
    drift *= dx;
    // The Taylor terms inside |z| < r and the drift term cancel pairwise.
    out.values[i] = (sum - fp[i] * drift) + drift * fp[i];
    out.b[i] = drift;
  }
  return out;
}

OperatorEval eval_Lphi(std::span<const double> f, const DensityField& rho, const KernelSpec& spec,
                       const OperatorOptions& options) {
  return eval_Lphi(f, KernelMatrix(rho, spec, options.quadrature), options);
}

OperatorEval eval_commutator(const DensityField& rho, std::span<const double> f,
                             const KernelMatrix& kernel, const OperatorOptions& options) {
  const std::size_t n = kernel.size();
  check_same_grid(n, f.size());
  check_same_grid(n, rho.size());
  const double dx = kernel.dx();
  const Grid1D& grid = rho.grid();
  const double r = resolve_radius(grid, kernel.spec(), options.r);
  const auto taylor = static_cast<std::size_t>(std::llround(r / dx));
  const std::vector<double> fp = derivative(f, grid.length(), options.derivative);

  OperatorEval out;
  out.values.assign(n, 0.0);
  out.b.assign(n, 0.0);
  out.a.assign(n, 0.0);
  out.drift_used = r;
  out.quadrature = kernel.quadrature();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    double sum = 0.0, b = 0.0, a = 0.0;
    for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const std::size_t jp = grid.wrap(ii + kk);
      const std::size_t jm = grid.wrap(ii - kk);
      const double wf = kernel.forward(i, k);
      const double wb = kernel.backward(i, k);
      sum += (f[jp] - f[i]) * rho[jp] * wf + (f[jm] - f[i]) * rho[jm] * wb;
      if (k < taylor) {
        const double z = static_cast<double>(k) * dx;
        b += z * (wf - wb);
        a += z * ((rho[jp] - rho[i]) * wf - (rho[jm] - rho[i]) * wb);
      }
    }
    sum *= dx;
    b *= dx;
    a *= dx;
    const double drift = rho[i] * b + a;
    out.values[i] = (sum - fp[i] * drift) + drift * fp[i];
    out.b[i] = b;
    out.a[i] = a;
  }
  return out;
}

OperatorEval eval_commutator(const DensityField& rho, std::span<const double> f,
                             const KernelSpec& spec, const OperatorOptions& options) {
  return eval_commutator(rho, f, KernelMatrix(rho, spec, options.quadrature), options);
}

std::vector<double> alignment_source(const KernelMatrix& kernel, std::span<const double> rho,
                                     std::span<const double> u) {
  const std::size_t n = kernel.size();
  check_same_grid(n, rho.size());
  check_same_grid(n, u.size());
  const double dx = kernel.dx();
  std::vector<double> out(n, 0.0);
  if (kernel.symmetric()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = rho[i], ui = u[i];
      double acc = 0.0;
      for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
        const std::size_t j = i + k < n ? i + k : i + k - n;
        const double flux = kernel.forward(i, k) * ri * rho[j] * (u[j] - ui) * dx;
        acc += flux;
        out[j] -= flux;
      }
      out[i] += acc;
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
      const std::size_t jp = (i + k) % n;
      const std::size_t jm = (i + n - k) % n;
      s += kernel.forward(i, k) * rho[jp] * (u[jp] - u[i]) + kernel.backward(i, k) * rho[jm] * (u[jm] - u[i]);
    }
    out[i] = rho[i] * s * dx;
  }
  return out;
}

double eval_phi_prime_kernel(const DensityField& rho, const KernelSpec& spec, std::size_t i,
                             std::ptrdiff_t k) {
  if (k == 0) throw SingularEvaluation("derivative kernel evaluated at zero offset");
  if (spec.family == KernelFamily::kMotschTadmor) {
    throw Error("the derivative kernel is defined for topological and geometric families");
  }
  const Grid1D& grid = rho.grid();
  const double tau = spec.effective_tau();
  const std::size_t j = grid.wrap(static_cast<std::ptrdiff_t>(i) + k);
  const double drho = rho[j] - rho[i];
  if (tau == 0.0 || drho == 0.0) return 0.0;
  const auto steps = static_cast<std::size_t>(k > 0 ? k : -k);
  const double z = static_cast<double>(steps) * grid.dx();
  const double h = eval_h(spec.profile(), z);
  if (h == 0.0) return 0.0;
  const std::size_t left = k > 0 ? i : j;
  const double d = topo_distance_nodes(rho, left, steps);
  const double sign = k > 0 ? 1.0 : -1.0;
  return -tau * spec.amplitude * h / (std::pow(z, 1.0 + spec.alpha - tau) * std::pow(d, tau + 1.0)) *
         drho * sign;
}

std::vector<double> eval_Lphi_prime(std::span<const double> f, const DensityField& rho,
                                    const KernelSpec& spec, Quadrature quadrature) {
  const Grid1D& grid = rho.grid();
  check_same_grid(grid.size(), f.size());
  const std::size_t band = band_for(grid, spec.support());
  const double boost = near_field_factor(spec.alpha, quadrature);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= band; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const auto ii = static_cast<std::ptrdiff_t>(i);
      double pair = (f[grid.wrap(ii + kk)] - f[i]) * eval_phi_prime_kernel(rho, spec, i, kk) +
                    (f[grid.wrap(ii - kk)] - f[i]) * eval_phi_prime_kernel(rho, spec, i, -kk);
      if (k == 1) pair *= boost;
      s += pair;
    }
    out[i] = s * grid.dx();
  }
  return out;
}

std::vector<double> enstrophy_density(std::span<const double> f, const Grid1D& grid,
                                      const KernelSpec& spec, Quadrature quadrature) {
  check_same_grid(grid.size(), f.size());
  const std::size_t band = band_for(grid, 2.0 * spec.r0);
  std::vector<double> weight(band);
  for (std::size_t k = 1; k <= band; ++k) {
    const double z = static_cast<double>(k) * grid.dx();
    weight[k - 1] = eval_h(spec.profile(), z) / std::pow(z, 1.0 + spec.alpha);
  }
  weight[0] *= near_field_factor(spec.alpha, quadrature);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    double s = 0.0;
    for (std::size_t k = 1; k <= band; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      const double dp = f[grid.wrap(ii + kk)] - f[i];
      const double dm = f[grid.wrap(ii - kk)] - f[i];
      s += (dp * dp + dm * dm) * weight[k - 1];
    }
    out[i] = s * grid.dx();
  }
  return out;
}

}  // namespace topoflock
