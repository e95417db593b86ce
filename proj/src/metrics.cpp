#include "topoflock/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "topoflock/errors.hpp"
#include "topoflock/geometry.hpp"

namespace topoflock {

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> columns = {
      "t",      "mass",     "momentum",  "energy", "V2",        "u_diam",       "q_max",        "rho_min",
      "rho_max", "lambda2", "campanato", "eta",    "enstrophy", "flatten_plus", "flatten_minus"};
  return columns;
}

void write_diagnostics_header(std::ostream& os) {
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
  std::ostringstream line;
  line.precision(17);
  line << r.t << ',' << r.mass << ',' << r.momentum << ',' << r.energy << ',' << r.V2 << ','
       << r.u_diam << ',' << r.q_max << ',' << r.rho_min << ',' << r.rho_max << ',' << r.lambda2
       << ',' << r.campanato << ',' << r.eta << ',' << r.enstrophy << ',' << r.flatten_plus << ','
       << r.flatten_minus << '\n';
  os << line.str();
}

double kinetic_energy(const DensityField& rho, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * u[i] * u[i];
  return 0.5 * s * rho.grid().dx();
}

double fluctuation_V2(const DensityField& rho, std::span<const double> u) {
  const double dx = rho.grid().dx();
  const double m0 = rho.total_mass();
  double p = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) p += rho[i] * u[i] * dx;
  const double ubar = p / m0;
  double var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) var += (u[i] - ubar) * (u[i] - ubar) * rho[i] * dx;
  return 2.0 * m0 * var;
}

double discrete_enstrophy(const KernelMatrix& kernel, std::span<const double> rho,
                          std::span<const double> u) {
  const std::size_t n = kernel.size();
  const double dx = kernel.dx();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= kernel.bandwidth(); ++k) {
      const std::size_t j = (i + k) % n;
      // Each unordered pair once; the 1/2 and the double count cancel.
      const double w = 0.5 * (kernel.forward(i, k) + kernel.backward(j, k));
      const double du = u[i] - u[j];
      s += w * du * du * rho[i] * rho[j];
    }
  }
  return s * dx * dx;
}

namespace {

// Integral over [a, b] of rho(x) g(u(x)) where rho is piecewise constant on
// cells and u is the periodic linear interpolant of the nodal values. g is a
// polynomial of degree <= 2 in u, so Simpson's rule is exact on each piece.
template <class G>
double piecewise_integral(const DensityField& rho, std::span<const double> u, double a, double b, G g) {
  const Grid1D& grid = rho.grid();
  const double dx = grid.dx();
  auto u_at = [&](double x) {
    const double s = x / dx;
    const double fl = std::floor(s);
    const auto j = static_cast<std::ptrdiff_t>(fl);
    const double w = s - fl;
    return (1.0 - w) * u[grid.wrap(j)] + w * u[grid.wrap(j + 1)];
  };
  auto rho_at = [&](double x) {
    return rho[grid.wrap(static_cast<std::ptrdiff_t>(std::floor(x / dx + 0.5)))];
  };
  // Break points: nodes (multiples of dx) and cell edges (half-integers).
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    const double next_half = (std::floor(2.0 * lo / dx + 1e-9) + 1.0) * 0.5 * dx;
    const double hi = std::min(b, next_half);
    if (hi > lo) {
      const double mid = 0.5 * (lo + hi);
      const double r = rho_at(mid);
      total += r * (hi - lo) / 6.0 * (g(u_at(lo)) + 4.0 * g(u_at(mid)) + g(u_at(hi)));
    }
    lo = hi;
  }
  return total;
}

}  // namespace

double campanato_term(const DensityField& rho, std::span<const double> u, double center, double r) {
  const double ball_mass = piecewise_integral(rho, u, center - r, center + r, [](double) { return 1.0; });
  const double ball_mom = piecewise_integral(rho, u, center - r, center + r, [](double v) { return v; });
  const double avg = ball_mom / ball_mass;
  const double w = r / 10.0;
  return piecewise_integral(rho, u, center - w, center + w,
                            [avg](double v) { return (v - avg) * (v - avg); });
}

double campanato_seminorm(const DensityField& rho, std::span<const double> u,
                          std::span<const double> radii) {
  double best = 0.0;
  for (double r : radii) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      best = std::max(best, campanato_term(rho, u, rho.grid().x(i), r));
    }
  }
  return best;
}

std::vector<double> default_campanato_radii(double r0) { return {0.5 * r0, 0.25 * r0, 0.125 * r0}; }

double default_lift(std::span<const double> u) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double diam = *hi - *lo;
  return (diam > 0.0 ? diam : 1.0) - *lo;
}

double flattening_expectation(const DensityField& rho, std::span<const double> u, double delta,
                              FlattenSign sign, double r0, double lift) {
  if (!(delta > 0.0)) throw Error("flattening needs delta > 0");
  const Grid1D& grid = rho.grid();
  const auto it = sign == FlattenSign::kPlus ? std::max_element(u.begin(), u.end())
                                             : std::min_element(u.begin(), u.end());
  const auto center = static_cast<std::size_t>(it - u.begin());
  const double extreme = *it + lift;
  const double threshold = sign == FlattenSign::kPlus ? extreme * (1.0 - delta) : extreme * (1.0 + delta);
  double in_ball = 0.0, in_set = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (torus_distance(grid.x(i), grid.x(center), grid.length()) >= r0) continue;
    const double mass = rho[i] * grid.dx();
    in_ball += mass;
    const double v = u[i] + lift;
    const bool member = sign == FlattenSign::kPlus ? v < threshold : v > threshold;
    if (member) in_set += mass;
  }
  return in_ball > 0.0 ? in_set / in_ball : 0.0;
}

double flattening_delta(double t) {
  if (t <= 1.0) return 1.0;
  const double tl = t * std::log(t);
  if (tl <= 1.0) return 1.0;
  return std::clamp(1.0 / std::sqrt(tl), 1e-3, 1.0);
}

double eta_clock(std::span<const double> times, std::span<const double> rho_min) {
  double eta = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    eta += 0.5 * (times[i] - times[i - 1]) * (rho_min[i] * rho_min[i] + rho_min[i - 1] * rho_min[i - 1]);
  }
  return eta;
}

RootLogFit fit_root_log(std::span<const double> times, std::span<const double> u_diam) {
  RootLogFit fit;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= std::exp(1.0)) continue;
    fit.C = std::max(fit.C, u_diam[i] * std::sqrt(std::log(times[i])));
    ++fit.samples;
  }
  return fit;
}

}  // namespace topoflock
