#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace topoflock {

/// Uniform periodic grid on the torus [0, length). Cell i is centred at
/// x_i = i * dx and covers [x_i - dx/2, x_i + dx/2).
class Grid1D {
 public:
  static constexpr std::size_t kMinCells = 8;

  explicit Grid1D(std::size_t n_cells, double length = 2.0 * std::numbers::pi);

  std::size_t size() const { return n_cells_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  double x(std::size_t i) const { return static_cast<double>(i) * dx_; }

  // Periodic index; total for any signed offset.
  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_cells_);
    return static_cast<std::size_t>(((i % n) + n) % n);
  }

  // Position reduced into [0, length).
  double wrap_position(double x) const;

  bool operator==(const Grid1D& other) const {
    return n_cells_ == other.n_cells_ && length_ == other.length_;
  }

 private:
  std::size_t n_cells_;
  double length_;
  double dx_;
};

/// Cell averages of a strictly positive density with a cached prefix sum.
///
/// prefix_mass()[i] is the mass to the left edge of cell i, so the cumulative
/// mass is piecewise linear in position and topological distances reduce to
/// two lookups.
class DensityField {
 public:
  // Throws NonPositiveDensity if any value is <= 0.
  DensityField(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> prefix_mass() const { return prefix_; }
  double total_mass() const { return prefix_.back(); }
  double min() const;
  double max() const;

  // Cumulative mass from the left edge of cell 0 to position s, continued
  // periodically so that cumulative(s + L) = cumulative(s) + M.
  double cumulative(double s) const;

  // Cumulative mass at node j (any integer, periodic continuation). For two
  // nodes the difference is the trapezoid rule on the nodal values.
  double node_cumulative(std::ptrdiff_t j) const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

struct VelocityField {
  Grid1D grid;
  std::vector<double> values;

  double min() const;
  double max() const;
  double diameter() const { return max() - min(); }
};

struct MomentumField {
  Grid1D grid;
  std::vector<double> values;

  static MomentumField from(const DensityField& rho, const VelocityField& u);
};

/// N agents on the torus of side `length` in dimension 1 or 2. Coordinates are
/// stored interleaved: agent i occupies [dim*i, dim*i + dim).
struct AgentSwarm {
  int dim = 1;
  double length = 2.0 * std::numbers::pi;
  std::vector<double> positions;
  std::vector<double> velocities;

  AgentSwarm() = default;
  AgentSwarm(int dim, double length, std::vector<double> positions, std::vector<double> velocities);

  std::size_t size() const { return positions.size() / static_cast<std::size_t>(dim); }
  std::span<const double> position(std::size_t i) const {
    return {positions.data() + dim * i, static_cast<std::size_t>(dim)};
  }
  std::span<const double> velocity(std::size_t i) const {
    return {velocities.data() + dim * i, static_cast<std::size_t>(dim)};
  }
  void wrap_positions();
};

double torus_distance(double a, double b, double length);
double torus_distance(std::span<const double> a, std::span<const double> b, double length);

// Signed minimal-image displacement b - a, in (-length/2, length/2].
double torus_displacement(double a, double b, double length);

enum class InitialKind { kUniform, kPerturbedSine, kTwoBump, kCustomSamples };

/// Parameters for the built-in initial configurations.
///
/// perturbed-sine: rho = rho_bar (1 + amp sin(k x)), u = u_bar + vel_amp sin(m x + phase).
/// two-bump: rho = rho_bar (1 + amp (exp(-(x-c1)^2/w^2) + exp(-(x-c2)^2/w^2))) on the
///   minimal image, u as for perturbed-sine.
struct InitialDataSpec {
  InitialKind kind = InitialKind::kPerturbedSine;
  double rho_bar = 1.0;
  double u_bar = 0.0;
  double amp = 0.5;
  int k = 1;
  double vel_amp = 1.0;
  int m = 1;
  double phase = 0.0;
  double bump_width = 0.5;
  double bump_center1 = 0.5 * std::numbers::pi;
  double bump_center2 = 1.5 * std::numbers::pi;
  std::vector<double> rho_samples;
  std::vector<double> u_samples;
};

// Nodal samples (midpoint-rule cell averages). Throws NonPositiveDensity.
std::pair<DensityField, VelocityField> build_initial_data(const Grid1D& grid,
                                                          const InitialDataSpec& spec);

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

// CSV with columns i,x,rho,u.
void write_fields_csv(std::ostream& os, const DensityField& rho, const VelocityField& u);
std::pair<std::vector<double>, std::vector<double>> read_fields_csv(std::istream& is);

}  // namespace topoflock
