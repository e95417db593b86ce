#include "topoflock/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoflock/errors.hpp"

namespace topoflock {

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

struct Faces {
  std::vector<double> rho_minus, rho_plus, u_minus, u_plus;
};

// Face values per cell. The velocity slope is weighted by the opposite face
// density so that the face momenta average back to rho_i u_i and face
// velocities stay within the neighbouring cell values.
Faces reconstruct(std::span<const double> rho, std::span<const double> u, bool second_order) {
  const std::size_t n = rho.size();
  Faces f{std::vector<double>(rho.begin(), rho.end()), std::vector<double>(rho.begin(), rho.end()),
          std::vector<double>(u.begin(), u.end()), std::vector<double>(u.begin(), u.end())};
  if (!second_order) return f;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
    const double sr = 0.5 * minmod(rho[ip] - rho[i], rho[i] - rho[im]);
    const double su = 0.5 * minmod(u[ip] - u[i], u[i] - u[im]);
    f.rho_plus[i] = rho[i] + sr;
    f.rho_minus[i] = rho[i] - sr;
    f.u_plus[i] = u[i] + su * f.rho_minus[i] / rho[i];
    f.u_minus[i] = u[i] - su * f.rho_plus[i] / rho[i];
  }
  return f;
}

std::vector<double> velocity(std::span<const double> rho, std::span<const double> m) {
  std::vector<double> u(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) u[i] = m[i] / rho[i];
  return u;
}

DensityField checked_density(const Grid1D& grid, std::vector<double> rho, double t) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) throw PositivityLoss(i, rho[i], t);
  }
  return DensityField(grid, std::move(rho));
}

double max_abs(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

HydroState HydroState::from(double t, const DensityField& rho, const VelocityField& u) {
  return HydroState{t, rho, MomentumField::from(rho, u)};
}

VelocityField HydroState::u() const {
  return VelocityField{rho.grid(), velocity(rho.values(), m.values)};
}

HydroRhs rhs(const HydroState& state, const KernelSpec& spec, const HydroOptions& options) {
  return rhs(state, KernelMatrix(state.rho, spec, options.quadrature), options);
}

HydroRhs rhs(const HydroState& state, const KernelMatrix& kernel, const HydroOptions& options) {
  const std::size_t n = state.rho.size();
  const double dx = state.grid().dx();
  const auto rho = state.rho.values();
  const std::vector<double> u = velocity(rho, state.m.values);
  const Faces faces = reconstruct(rho, u, options.second_order);

  // flux[i] sits on the face between cells i and i+1.
  std::vector<double> frho(n), fm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const double rl = faces.rho_plus[i], ul = faces.u_plus[i];
    const double rr = faces.rho_minus[ip], ur = faces.u_minus[ip];
    const double a = std::max(std::abs(ul), std::abs(ur));
    frho[i] = 0.5 * (rl * (ul + a) + rr * (ur - a));
    fm[i] = 0.5 * (rl * ul * (ul + a) + rr * ur * (ur - a));
  }

  HydroRhs out{std::vector<double>(n), alignment_source(kernel, rho, u)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    out.drho[i] = -(frho[i] - frho[im]) / dx;
    out.dm[i] += -(fm[i] - fm[im]) / dx;
  }
  return out;
}

double stable_dt(const HydroState& state, const KernelSpec& spec, const HydroOptions& options) {
  return stable_dt(state, KernelMatrix(state.rho, spec, options.quadrature), options);
}

double stable_dt(const HydroState& state, const KernelMatrix& kernel, const HydroOptions& options) {
  const double dx = state.grid().dx();
  const double umax = max_abs(velocity(state.rho.values(), state.m.values));
  const std::vector<double> rows = kernel.weighted_row_sums(state.rho.values());
  const double smax = *std::max_element(rows.begin(), rows.end());
  double bound = std::numeric_limits<double>::infinity();
  if (umax > 0.0) bound = dx / umax;
  if (smax > 0.0) bound = std::min(bound, 0.5 / smax);
  return options.cfl * bound;
}

namespace {

HydroState ssp_rk3(const HydroState& state, const KernelSpec& spec, const KernelMatrix& first,
                   double dt, const HydroOptions& options) {
  const Grid1D& grid = state.grid();
  const std::size_t n = state.rho.size();

  auto euler = [&](const HydroState& s, const KernelMatrix* kernel) {
    const HydroRhs r = kernel ? rhs(s, *kernel, options) : rhs(s, spec, options);
    std::vector<double> rho(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      rho[i] = s.rho[i] + dt * r.drho[i];
      m[i] = s.m.values[i] + dt * r.dm[i];
    }
    return std::make_pair(std::move(rho), std::move(m));
  };
  // (a s0 + b s1) / c with integer weights. Rounded 1/3 and 2/3 sum to less
  // than one and would bleed mass by ~1e-16 per step.
  auto combine = [&](double a, const HydroState& s0, double b,
                     std::pair<std::vector<double>, std::vector<double>> s1, double c, double t) {
    for (std::size_t i = 0; i < n; ++i) {
      s1.first[i] = (a * s0.rho[i] + b * s1.first[i]) / c;
      s1.second[i] = (a * s0.m.values[i] + b * s1.second[i]) / c;
    }
    DensityField rho = checked_density(grid, std::move(s1.first), t);
    return HydroState{t, std::move(rho), MomentumField{grid, std::move(s1.second)}};
  };

  auto e1 = euler(state, &first);
  const HydroState s1 = combine(0.0, state, 1.0, std::move(e1), 1.0, state.t + dt);
  auto e2 = euler(s1, nullptr);
  const HydroState s2 = combine(3.0, state, 1.0, std::move(e2), 4.0, state.t + 0.5 * dt);
  auto e3 = euler(s2, nullptr);
  return combine(1.0, state, 2.0, std::move(e3), 3.0, state.t + dt);
}

}  // namespace

HydroState step(const HydroState& state, const KernelSpec& spec, double dt,
                const HydroOptions& options) {
  const KernelMatrix kernel(state.rho, spec, options.quadrature);
  const double bound = stable_dt(state, kernel, options);
  if (dt > bound * (1.0 + 1e-12)) throw CflViolation(dt, bound);
  return ssp_rk3(state, spec, kernel, dt, options);
}

EQuantity compute_e(const HydroState& state, const KernelSpec& spec, const HydroOptions& options) {
  const std::size_t n = state.rho.size();
  const double length = state.grid().length();
  const std::vector<double> u = velocity(state.rho.values(), state.m.values);
  const std::vector<double> ux = derivative(u, length, options.derivative);
  OperatorOptions op;
  op.quadrature = options.quadrature;
  op.derivative = options.derivative;
  const OperatorEval lrho = eval_Lphi(state.rho.values(), state.rho, spec, op);
  EQuantity out{std::vector<double>(n), std::vector<double>(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    out.e[i] = ux[i] + lrho.values[i];
    out.q[i] = out.e[i] / state.rho[i];
  }
  out.q1 = derivative(out.q, length, options.derivative);
  for (std::size_t i = 0; i < n; ++i) out.q1[i] /= state.rho[i];
  return out;
}

std::vector<double> e0_free_velocity(const DensityField& rho, const KernelSpec& spec, double u_bar,
                                     const HydroOptions& options) {
  OperatorOptions op;
  op.quadrature = options.quadrature;
  op.derivative = options.derivative;
  std::vector<double> g = eval_Lphi(rho.values(), rho, spec, op).values;
  for (double& v : g) v = -v;
  std::vector<double> u = spectral_antiderivative(g, rho.grid().length());
  for (double& v : u) v += u_bar;
  return u;
}

Smallness check_smallness(const HydroState& state, const KernelSpec& spec,
                          const HydroOptions& options) {
  if (spec.alpha >= 1.0) return {0.0, true};
  const EQuantity eq = compute_e(state, spec, options);
  const double qmax = max_abs(eq.q);
  const double m0 = state.rho.total_mass();
  return {m0 * qmax * (1.0 - spec.alpha) / std::pow(spec.r0, 1.0 - spec.alpha), false};
}

HydroRunResult integrate(const HydroState& initial, const KernelSpec& spec,
                         const HydroRunOptions& options, const HydroOutputObserver& on_output,
                         const HydroStepObserver& on_step) {
  HydroRunResult result{initial};
  HydroState& state = result.final_state;
  if (on_output) on_output(state);
  if (options.t_final <= 0.0) return result;
  const double interval = options.output_interval > 0.0 ? options.output_interval : options.t_final;
  std::size_t next_output = 1;
  const double eps = 1e-12 * std::max(1.0, options.t_final);
  try {
    while (state.t < options.t_final - eps) {
      const double t_out = std::min(options.t_final, static_cast<double>(next_output) * interval);
      const KernelMatrix kernel(state.rho, spec, options.numerics.quadrature);
      const double dt = std::min(stable_dt(state, kernel, options.numerics), t_out - state.t);
      HydroState next = ssp_rk3(state, spec, kernel, dt, options.numerics);
      const bool at_output = std::abs(next.t - t_out) <= eps;
      if (at_output) next.t = t_out;
      if (on_step) on_step(state, next);
      state = std::move(next);
      ++result.steps;
      if (at_output) {
        if (on_output) on_output(state);
        ++next_output;
      }
    }
  } catch (const PositivityLoss& e) {
    result.termination = "positivity-loss: " + std::string(e.what());
  } catch (const CflViolation& e) {
    result.termination = "cfl-violation: " + std::string(e.what());
  } catch (const Error& e) {
    result.termination = "error: " + std::string(e.what());
  }
  return result;
}

}  // namespace topoflock
