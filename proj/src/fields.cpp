#include "topoflock/fields.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "topoflock/errors.hpp"

namespace topoflock {

NonPositiveDensity::NonPositiveDensity(std::size_t cell, double value)
    : Error("non-positive density " + std::to_string(value) + " in cell " + std::to_string(cell)),
      cell_(cell),
      value_(value) {}

PositivityLoss::PositivityLoss(std::size_t cell, double value, double time)
    : Error("density lost positivity (" + std::to_string(value) + ") in cell " +
            std::to_string(cell) + " at t=" + std::to_string(time)),
      cell_(cell),
      time_(time) {}

CflViolation::CflViolation(double dt, double bound)
    : Error("time step " + std::to_string(dt) + " exceeds the stability bound " +
            std::to_string(bound)),
      dt_(dt),
      bound_(bound) {}

StiffPairDetected::StiffPairDetected(std::size_t i, std::size_t j, double distance)
    : Error("agents " + std::to_string(i) + " and " + std::to_string(j) +
            " are too close (r=" + std::to_string(distance) + ")"),
      i_(i),
      j_(j),
      distance_(distance) {}

namespace {
std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}
}  // namespace

ConfigInvalid::ConfigInvalid(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

Grid1D::Grid1D(std::size_t n_cells, double length)
    : n_cells_(n_cells), length_(length), dx_(length / static_cast<double>(n_cells)) {
  if (n_cells < kMinCells) {
    throw Error("grid needs at least " + std::to_string(kMinCells) + " cells");
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("torus length must be positive");
}

double Grid1D::wrap_position(double x) const {
  double r = std::fmod(x, length_);
  if (r < 0.0) r += length_;
  if (r >= length_) r -= length_;
  return r;
}

DensityField::DensityField(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error("density size does not match grid");
  prefix_.resize(values_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) throw NonPositiveDensity(i, values_[i]);
    prefix_[i + 1] = prefix_[i] + grid_.dx() * values_[i];
  }
}

double DensityField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double DensityField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double DensityField::cumulative(double s) const {
  const double dx = grid_.dx();
  const double len = grid_.length();
  // Shift so that 0 is the left edge of cell 0.
  const double shifted = s + 0.5 * dx;
  const double periods = std::floor(shifted / len);
  double local = shifted - periods * len;
  auto cell = static_cast<std::size_t>(local / dx);
  if (cell >= values_.size()) cell = values_.size() - 1;
  local -= static_cast<double>(cell) * dx;
  return periods * total_mass() + prefix_[cell] + values_[cell] * local;
}

double DensityField::node_cumulative(std::ptrdiff_t j) const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  const std::ptrdiff_t q = (j >= 0) ? j / n : -((-j + n - 1) / n);
  const auto idx = static_cast<std::size_t>(j - q * n);
  return static_cast<double>(q) * total_mass() + prefix_[idx] + 0.5 * grid_.dx() * values_[idx];
}

double VelocityField::min() const { return *std::min_element(values.begin(), values.end()); }
double VelocityField::max() const { return *std::max_element(values.begin(), values.end()); }

MomentumField MomentumField::from(const DensityField& rho, const VelocityField& u) {
  MomentumField m{rho.grid(), std::vector<double>(rho.size())};
  for (std::size_t i = 0; i < rho.size(); ++i) m.values[i] = rho[i] * u.values[i];
  return m;
}

AgentSwarm::AgentSwarm(int dim_, double length_, std::vector<double> positions_,
                       std::vector<double> velocities_)
    : dim(dim_), length(length_), positions(std::move(positions_)), velocities(std::move(velocities_)) {
  if (dim != 1 && dim != 2) throw Error("agent dimension must be 1 or 2");
  if (positions.size() != velocities.size() || positions.size() % dim != 0) {
    throw Error("agent positions and velocities must have matching shapes");
  }
  if (size() < 2) throw Error("a swarm needs at least two agents");
  wrap_positions();
}

void AgentSwarm::wrap_positions() {
  for (double& x : positions) {
    x = std::fmod(x, length);
    if (x < 0.0) x += length;
    if (x >= length) x -= length;
  }
}

double torus_displacement(double a, double b, double length) {
  double d = std::fmod(b - a, length);
  if (d > 0.5 * length) d -= length;
  if (d <= -0.5 * length) d += length;
  return d;
}

double torus_distance(double a, double b, double length) {
  return std::abs(torus_displacement(a, b, length));
}

double torus_distance(std::span<const double> a, std::span<const double> b, double length) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = torus_displacement(a[k], b[k], length);
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::pair<DensityField, VelocityField> build_initial_data(const Grid1D& grid,
                                                          const InitialDataSpec& spec) {
  const std::size_t n = grid.size();
  std::vector<double> rho(n), u(n);
  switch (spec.kind) {
    case InitialKind::kUniform:
      std::fill(rho.begin(), rho.end(), spec.rho_bar);
      std::fill(u.begin(), u.end(), spec.u_bar);
      break;
    case InitialKind::kPerturbedSine:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        rho[i] = spec.rho_bar * (1.0 + spec.amp * std::sin(spec.k * x));
        u[i] = spec.u_bar + spec.vel_amp * std::sin(spec.m * x + spec.phase);
      }
      break;
    case InitialKind::kTwoBump:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double d1 = torus_displacement(spec.bump_center1, x, grid.length());
        const double d2 = torus_displacement(spec.bump_center2, x, grid.length());
        const double w2 = spec.bump_width * spec.bump_width;
        rho[i] = spec.rho_bar * (1.0 + spec.amp * (std::exp(-d1 * d1 / w2) + std::exp(-d2 * d2 / w2)));
        u[i] = spec.u_bar + spec.vel_amp * std::sin(spec.m * x + spec.phase);
      }
      break;
    case InitialKind::kCustomSamples:
      if (spec.rho_samples.size() != n || (!spec.u_samples.empty() && spec.u_samples.size() != n)) {
        throw Error("custom samples must have one value per cell");
      }
      rho = spec.rho_samples;
      if (spec.u_samples.empty()) {
        std::fill(u.begin(), u.end(), spec.u_bar);
      } else {
        u = spec.u_samples;
      }
      break;
  }
  DensityField density(grid, std::move(rho));
  return {std::move(density), VelocityField{grid, std::move(u)}};
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::kUniform: return "uniform";
    case InitialKind::kPerturbedSine: return "perturbed-sine";
    case InitialKind::kTwoBump: return "two-bump";
    case InitialKind::kCustomSamples: return "custom-samples";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& name) {
  if (name == "uniform") return InitialKind::kUniform;
  if (name == "perturbed-sine") return InitialKind::kPerturbedSine;
  if (name == "two-bump") return InitialKind::kTwoBump;
  if (name == "custom-samples") return InitialKind::kCustomSamples;
  throw Error("unknown initial data kind '" + name + "'");
}

void write_fields_csv(std::ostream& os, const DensityField& rho, const VelocityField& u) {
  os << "i,x,rho,u\n";
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    line.str("");
    line << i << ',' << rho.grid().x(i) << ',' << rho[i] << ',' << u.values[i] << '\n';
    os << line.str();
  }
}

std::pair<std::vector<double>, std::vector<double>> read_fields_csv(std::istream& is) {
  std::vector<double> rho, u;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.find("rho") != std::string::npos) continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() < 4) throw Error("field CSV rows need columns i,x,rho,u");
    rho.push_back(cols[2]);
    u.push_back(cols[3]);
  }
  return {std::move(rho), std::move(u)};
}

}  // namespace topoflock
