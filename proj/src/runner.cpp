#include "topoflock/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "topoflock/errors.hpp"
#include "topoflock/spectral.hpp"

#ifndef TOPOFLOCK_VERSION
#define TOPOFLOCK_VERSION "unknown"
#endif

namespace topoflock {

namespace fs = std::filesystem;

bool RunSummary::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  for (const auto& child : children) {
    if (!child.all_passed()) return false;
  }
  return true;
}

std::string version_string() { return TOPOFLOCK_VERSION; }

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double max_abs(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double sum_dx(std::span<const double> v, double dx) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * dx;
}

std::string snapshot_name(std::size_t index) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(4) << std::setfill('0') << index << ".csv";
  return os.str();
}

void finish_exit_code(RunSummary& summary, const RunControls& controls) {
  if (summary.aborted()) {
    summary.exit_code = 4;
  } else if (controls.strict && !summary.all_passed()) {
    summary.exit_code = 3;
  } else {
    summary.exit_code = 0;
  }
}

void write_operator_dump(const fs::path& path, const HydroState& state, const KernelSpec& spec,
                         const HydroOptions& options) {
  OperatorOptions op;
  op.quadrature = options.quadrature;
  op.derivative = options.derivative;
  const VelocityField u = state.u();
  const OperatorEval lrho = eval_Lphi(state.rho.values(), state.rho, spec, op);
  const OperatorEval cu = eval_commutator(state.rho, u.values, spec, op);
  std::ofstream out(path);
  out << "i,x,rho,u,L_rho,b_r,C_u,a_r\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    out << i << ',' << state.grid().x(i) << ',' << state.rho[i] << ',' << u.values[i] << ','
        << lrho.values[i] << ',' << lrho.b[i] << ',' << cu.values[i] << ',' << cu.a[i] << '\n';
  }
}

RunSummary run_hydro(const ExperimentConfig& config, const RunControls& controls) {
  RunSummary summary;
  const KernelSpec& spec = config.kernel;
  const HydroState initial = initial_hydro_state(config);
  const fs::path dir(config.out_dir);
  if (controls.write_files) {
    fs::create_directories(dir);
    if (config.snapshots) fs::create_directories(dir / "snapshots");
    if (controls.dump_operators) write_operator_dump(dir / "operators.csv", initial, spec, config.numerics);
  }
  const bool with_lambda2 = config.lambda2 && initial.rho.size() <= 2048;

  const double m0 = initial.rho.total_mass();
  const double p0 = sum_dx(initial.m.values, initial.grid().dx());
  const double rho0_min = initial.rho.min(), rho0_max = initial.rho.max();

  double eta = 0.0;
  double worst_mass = 0.0, worst_momentum = 0.0, worst_energy = 0.0, worst_umax = 0.0;
  double worst_rho_excursion = 0.0;
  std::size_t snapshot_index = 0;

  const HydroOutputObserver on_output = [&](const HydroState& s) {
    DiagnosticsRecord rec = hydro_record(s, spec, config.numerics, with_lambda2);
    rec.eta = eta;
    summary.records.push_back(rec);
    if (controls.write_files && config.snapshots) {
      std::ofstream snap(dir / "snapshots" / snapshot_name(snapshot_index));
      write_fields_csv(snap, s.rho, s.u());
    }
    ++snapshot_index;
  };
  const HydroStepObserver on_step = [&](const HydroState& before, const HydroState& after) {
    const double dt = after.t - before.t;
    const double a = before.rho.min(), b = after.rho.min();
    eta += 0.5 * dt * (a * a + b * b);
    const double dx = after.grid().dx();
    worst_mass = std::max(worst_mass, std::abs(after.rho.total_mass() - m0) / m0);
    worst_momentum = std::max(worst_momentum, std::abs(sum_dx(after.m.values, dx) - p0));
    const VelocityField ub = before.u(), ua = after.u();
    const double e_before = kinetic_energy(before.rho, ub.values);
    const double e_after = kinetic_energy(after.rho, ua.values);
    worst_energy = std::max(worst_energy, (e_after - e_before) / std::max(e_before, 1e-300));
    const double scale = 1.0 + std::max(std::abs(ub.max()), std::abs(ub.min()));
    worst_umax = std::max({worst_umax, (ua.max() - ub.max()) / scale, (ub.min() - ua.min()) / scale});
    worst_rho_excursion =
        std::max({worst_rho_excursion, rho0_min - after.rho.min(), after.rho.max() - rho0_max});
  };

  HydroRunOptions run_options{config.t_final, config.output_interval, config.numerics};
  const HydroRunResult result = integrate(initial, spec, run_options, on_output, on_step);
  summary.termination = result.termination;
  summary.steps = result.steps;

  if (controls.write_files) {
    std::ofstream csv(dir / "diagnostics.csv");
    write_diagnostics_header(csv);
    for (const auto& r : summary.records) write_diagnostics_row(csv, r);
  }

  auto& checks = summary.checks;
  checks.push_back({"mass-conservation", worst_mass <= 1e-12, "max relative drift " + fmt(worst_mass)});
  if (spec.family != KernelFamily::kMotschTadmor) {
    const double tol = 1e-10 * (1.0 + std::abs(p0));
    checks.push_back({"momentum-conservation", worst_momentum <= tol, "max drift " + fmt(worst_momentum)});
  }
  checks.push_back({"velocity-max-principle", worst_umax <= 1e-12,
                    "largest per-step overshoot " + fmt(worst_umax)});
  checks.push_back({"energy-nonincreasing", worst_energy <= 1e-8,
                    "largest per-step relative increase " + fmt(worst_energy)});
  if (config.e0_free) {
    checks.push_back({"density-bounds", worst_rho_excursion <= 1e-3,
                      "largest excursion outside the initial range " + fmt(worst_rho_excursion)});
  }
  const auto& recs = summary.records;
  if (!recs.empty() && recs.front().q_max > 1e-8) {
    double drift = 0.0;
    for (const auto& r : recs) {
      if (r.t <= 5.0 + 1e-12) drift = std::max(drift, std::abs(r.q_max - recs.front().q_max));
    }
    drift /= recs.front().q_max;
    checks.push_back({"q-transport", drift <= 0.05, "max relative drift of max|q| on [0,5] " + fmt(drift)});
  }
  if (with_lambda2 && recs.size() > 1) {
    std::vector<double> t, v2, l2;
    for (const auto& r : recs) {
      t.push_back(r.t);
      v2.push_back(r.V2);
      l2.push_back(r.lambda2);
    }
    const DecayCheck decay = check_decay_bound(t, v2, l2, 0.05);
    checks.push_back({"spectral-decay-bound", decay.holds, "worst slack " + fmt(decay.worst_slack)});
  }
  if (recs.size() > 1) {
    bool decreasing = true;
    for (std::size_t k = 1; k < recs.size(); ++k) decreasing = decreasing && recs[k].u_diam < recs[k - 1].u_diam;
    checks.push_back({"u-diam-decreasing", decreasing,
                      "u_diam " + fmt(recs.front().u_diam) + " -> " + fmt(recs.back().u_diam)});
    std::vector<double> t, d;
    for (const auto& r : recs) {
      t.push_back(r.t);
      d.push_back(r.u_diam);
    }
    const RootLogFit fit = fit_root_log(t, d);
    checks.push_back({"root-log-envelope", true,
                      "fitted C = " + fmt(fit.C) + " over " + std::to_string(fit.samples) + " samples"});
  }
  return summary;
}

DiagnosticsRecord swarm_record(const SwarmState& state) {
  const AgentSwarm& s = state.swarm;
  const auto n = static_cast<double>(s.size());
  const auto dim = static_cast<std::size_t>(s.dim);
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.mass = 1.0;
  const std::vector<double> p = total_momentum(s);
  rec.momentum = p[0] / n;
  double energy = 0.0;
  for (double v : s.velocities) energy += v * v;
  rec.energy = 0.5 * energy / n;
  double v2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = s.velocities[i * dim + c] - s.velocities[j * dim + c];
        v2 += d * d;
      }
    }
  }
  rec.V2 = v2 / (n * n);
  rec.u_diam = velocity_diameter(s);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.q_max = rec.rho_min = rec.rho_max = rec.lambda2 = rec.campanato = nan;
  rec.enstrophy = rec.flatten_plus = rec.flatten_minus = nan;
  return rec;
}

RunSummary run_agents(const ExperimentConfig& config, const RunControls& controls) {
  RunSummary summary;
  SwarmState state{0.0, initial_swarm(config)};
  const fs::path dir(config.out_dir);
  if (controls.write_files) {
    fs::create_directories(dir);
    if (config.snapshots) fs::create_directories(dir / "snapshots");
  }
  const auto dim = static_cast<std::size_t>(state.swarm.dim);
  const std::vector<double> p0 = total_momentum(state.swarm);
  double worst_momentum = 0.0, worst_overshoot = 0.0;
  std::size_t snapshot_index = 0;

  auto output = [&]() {
    summary.records.push_back(swarm_record(state));
    if (controls.write_files && config.snapshots) {
      std::ofstream snap(dir / "snapshots" / snapshot_name(snapshot_index));
      write_swarm_csv(snap, state.swarm);
    }
    ++snapshot_index;
  };
  output();
  const double eps = 1e-12 * std::max(1.0, config.t_final);
  std::size_t next_output = 1;
  try {
    while (state.t < config.t_final - eps) {
      const double t_out = std::min(config.t_final, static_cast<double>(next_output) * config.output_interval);
      const double dt = std::min(config.agent_dt, t_out - state.t);
      const SwarmState before = state;
      AdvanceResult adv = swarm_advance(state, config.kernel, dt, config.agent_options);
      state = std::move(adv.state);
      ++summary.steps;
      const std::vector<double> p = total_momentum(state.swarm);
      for (std::size_t c = 0; c < dim; ++c) worst_momentum = std::max(worst_momentum, std::abs(p[c] - p0[c]));
      for (std::size_t c = 0; c < dim; ++c) {
        double bmax = -std::numeric_limits<double>::infinity(), bmin = -bmax, amax = bmax, amin = bmin;
        for (std::size_t i = 0; i < state.swarm.size(); ++i) {
          bmax = std::max(bmax, before.swarm.velocities[i * dim + c]);
          bmin = std::min(bmin, before.swarm.velocities[i * dim + c]);
          amax = std::max(amax, state.swarm.velocities[i * dim + c]);
          amin = std::min(amin, state.swarm.velocities[i * dim + c]);
        }
        worst_overshoot = std::max({worst_overshoot, amax - bmax, bmin - amin});
      }
      if (std::abs(state.t - t_out) <= eps) {
        state.t = t_out;
        output();
        ++next_output;
      }
    }
  } catch (const StiffPairDetected& e) {
    summary.termination = "stiff-pair: " + std::string(e.what());
  } catch (const Error& e) {
    summary.termination = "error: " + std::string(e.what());
  }

  if (controls.write_files) {
    std::ofstream csv(dir / "diagnostics.csv");
    write_diagnostics_header(csv);
    for (const auto& r : summary.records) write_diagnostics_row(csv, r);
  }
  const auto n = static_cast<double>(state.swarm.size());
  if (config.kernel.family != KernelFamily::kMotschTadmor) {
    const double tol = 1e-9 * n;
    summary.checks.push_back({"momentum-conservation", worst_momentum <= tol, "max drift " + fmt(worst_momentum)});
  }
  summary.checks.push_back({"velocity-max-principle", worst_overshoot <= 1e-9,
                            "largest per-step overshoot " + fmt(worst_overshoot)});
  const Connectivity graph = connectivity_graph(state.swarm, config.kernel, 0.0, config.agent_options);
  summary.checks.push_back({"connectivity", true, std::to_string(graph.components) + " component(s) at the end"});
  if (summary.records.size() > 1) {
    const bool shrank = summary.records.back().u_diam < summary.records.front().u_diam;
    summary.checks.push_back({"u-diam-decreasing", shrank,
                              "u_diam " + fmt(summary.records.front().u_diam) + " -> " +
                                  fmt(summary.records.back().u_diam)});
  }
  return summary;
}

RunSummary run_spectral_only(const ExperimentConfig& config, const RunControls& controls) {
  RunSummary summary;
  const HydroState state = initial_hydro_state(config);
  const SpectralReport report = lambda2(state.rho, config.kernel, config.numerics.quadrature);
  DiagnosticsRecord rec = hydro_record(state, config.kernel, config.numerics, false);
  rec.lambda2 = report.lambda2;
  summary.records.push_back(rec);
  summary.checks.push_back({"lambda2-positive", report.lambda2 > 0.0, "lambda2 = " + fmt(report.lambda2)});
  summary.checks.push_back({"eigen-residual", report.residual <= 1e-8, "residual " + fmt(report.residual)});
  if (controls.write_files) {
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    std::ofstream csv(dir / "diagnostics.csv");
    write_diagnostics_header(csv);
    write_diagnostics_row(csv, rec);
    std::ofstream vec(dir / "eigvec2.csv");
    vec << "i,x,w\n" << std::setprecision(17);
    for (std::size_t i = 0; i < report.eigvec2.size(); ++i) {
      vec << i << ',' << state.grid().x(i) << ',' << report.eigvec2[i] << '\n';
    }
  }
  return summary;
}

RunSummary run_sweep(const ExperimentConfig& config, const RunControls& controls) {
  RunSummary summary;
  const std::vector<ExperimentConfig> children = expand_sweep(config);
  summary.children.resize(children.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < children.size(); k = next++) {
      summary.children[k] = run_experiment(children[k], controls);
    }
  };
  const std::size_t pool = std::max<std::size_t>(1, std::min(config.workers, children.size()));
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < pool; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& child : summary.children) {
    if (child.aborted() && !summary.aborted()) summary.termination = "child aborted: " + child.name;
  }
  return summary;
}

}  // namespace

HydroState initial_hydro_state(const ExperimentConfig& config) {
  InitialDataSpec spec = config.initial;
  std::size_t n = config.n_cells;
  if (spec.kind == InitialKind::kCustomSamples || config.mode == RunMode::kSpectralOnly) {
    std::ifstream in(config.samples_path);
    if (!in) throw Error("cannot read samples '" + config.samples_path + "'");
    auto [rho, u] = read_fields_csv(in);
    spec.kind = InitialKind::kCustomSamples;
    n = rho.size();
    spec.rho_samples = std::move(rho);
    spec.u_samples = std::move(u);
  }
  const Grid1D grid(n, config.length);
  auto [rho, u] = build_initial_data(grid, spec);
  if (config.e0_free) u.values = e0_free_velocity(rho, config.kernel, spec.u_bar, config.numerics);
  return HydroState::from(0.0, rho, u);
}

AgentSwarm initial_swarm(const ExperimentConfig& config) {
  const Grid1D grid(std::max<std::size_t>(config.n_cells, Grid1D::kMinCells), config.length);
  const DensityField rho = build_initial_data(grid, config.initial).first;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = config.agent_count;
  const int dim = config.agent_dim;
  const InitialDataSpec& init = config.initial;
  std::vector<double> x(n * dim), v(n * dim);
  const double half = 0.5 * grid.dx();
  for (std::size_t i = 0; i < n; ++i) {
    // Jittered quantiles of the mass: neighbours stay at least half a
    // quantile apart, so no pair starts near the stiff r^-(1+alpha) range.
    // The cumulative mass is zero at the left edge of cell 0.
    const double target = (static_cast<double>(i) + 0.25 + 0.5 * unit(rng)) / static_cast<double>(n) * rho.total_mass();
    double lo = -half, hi = config.length - half;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rho.cumulative(mid) < target ? lo : hi) = mid;
    }
    const double xi = grid.wrap_position(0.5 * (lo + hi));
    x[i * dim] = xi;
    v[i * dim] = init.u_bar + init.vel_amp * std::sin(init.m * xi + init.phase);
    if (dim == 2) {
      const double yi = unit(rng) * config.length;
      x[i * dim + 1] = yi;
      v[i * dim + 1] = init.vel_amp * std::cos(init.m * yi + init.phase);
    }
  }
  return AgentSwarm(dim, config.length, std::move(x), std::move(v));
}

DiagnosticsRecord hydro_record(const HydroState& state, const KernelSpec& spec,
                               const HydroOptions& options, bool with_lambda2) {
  DiagnosticsRecord rec;
  const VelocityField u = state.u();
  const double dx = state.grid().dx();
  rec.t = state.t;
  rec.mass = state.rho.total_mass();
  rec.momentum = sum_dx(state.m.values, dx);
  rec.energy = kinetic_energy(state.rho, u.values);
  rec.V2 = fluctuation_V2(state.rho, u.values);
  rec.u_diam = u.diameter();
  rec.q_max = max_abs(compute_e(state, spec, options).q);
  rec.rho_min = state.rho.min();
  rec.rho_max = state.rho.max();
  if (with_lambda2) rec.lambda2 = lambda2(state.rho, spec, options.quadrature).lambda2;
  rec.campanato = campanato_seminorm(state.rho, u.values, default_campanato_radii(spec.r0));
  const KernelMatrix kernel(state.rho, spec, options.quadrature);
  rec.enstrophy = discrete_enstrophy(kernel, state.rho.values(), u.values);
  const double delta = flattening_delta(state.t);
  const double lift = default_lift(u.values);
  rec.flatten_plus = flattening_expectation(state.rho, u.values, delta, FlattenSign::kPlus, spec.r0, lift);
  rec.flatten_minus = flattening_expectation(state.rho, u.values, delta, FlattenSign::kMinus, spec.r0, lift);
  return rec;
}

RunSummary run_experiment(const ExperimentConfig& config, const RunControls& controls) {
  const auto start = std::chrono::steady_clock::now();
  RunSummary summary;
  try {
    switch (config.mode) {
      case RunMode::kHydro1d: summary = run_hydro(config, controls); break;
      case RunMode::kAgents: summary = run_agents(config, controls); break;
      case RunMode::kSpectralOnly: summary = run_spectral_only(config, controls); break;
      case RunMode::kSweep: summary = run_sweep(config, controls); break;
    }
  } catch (const Error& e) {
    summary.termination = "error: " + std::string(e.what());
  }
  summary.name = config.name;
  summary.mode = to_string(config.mode);
  summary.config_hash = config_hash(config);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish_exit_code(summary, controls);
  for (const auto& child : summary.children) summary.exit_code = std::max(summary.exit_code, child.exit_code);
  if (controls.write_files) {
    fs::create_directories(config.out_dir);
    std::ofstream manifest(fs::path(config.out_dir) / "manifest.txt");
    write_manifest(manifest, summary, config);
    std::ofstream cfg(fs::path(config.out_dir) / "config.ini");
    cfg << serialize_config(config);
  }
  return summary;
}

void write_manifest(std::ostream& os, const RunSummary& summary, const ExperimentConfig& config) {
  std::size_t passed = 0;
  for (const auto& c : summary.checks) passed += c.passed ? 1 : 0;
  os << "name: " << summary.name << '\n';
  os << "mode: " << summary.mode << '\n';
  os << "version: " << version_string() << '\n';
  os << "config_hash: " << std::hex << std::setw(16) << std::setfill('0') << summary.config_hash
     << std::dec << std::setfill(' ') << '\n';
  os << "seed: " << config.seed << '\n';
  os << "wall_seconds: " << std::setprecision(4) << summary.wall_seconds << '\n';
  os << "termination: " << summary.termination << '\n';
  os << "steps: " << summary.steps << '\n';
  for (const auto& c : summary.checks) {
    os << "check." << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " (" << c.detail << ")\n";
  }
  os << "acceptance: " << passed << '/' << summary.checks.size() << " passed\n";
  for (const auto& child : summary.children) {
    os << "child: " << child.name << " termination=" << child.termination
       << " exit=" << child.exit_code << " checks=" << (child.all_passed() ? "PASS" : "FAIL") << '\n';
  }
  os << "exit_code: " << summary.exit_code << '\n';
}

}  // namespace topoflock
