#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <vector>

#include "topoflock/agents.hpp"
#include "topoflock/config.hpp"
#include "topoflock/errors.hpp"
#include "topoflock/geometry.hpp"
#include "topoflock/hydro.hpp"
#include "topoflock/metrics.hpp"
#include "topoflock/runner.hpp"
#include "topoflock/singular_ops.hpp"
#include "topoflock/spectral.hpp"

namespace py = pybind11;
using namespace topoflock;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

DensityField density(const Array& rho, double length) {
  return DensityField(Grid1D(static_cast<std::size_t>(rho.size()), length), to_vec(rho));
}

OperatorOptions operator_options(double r, const std::string& quadrature) {
  OperatorOptions o;
  o.r = r;
  o.quadrature = quadrature_from_string(quadrature);
  return o;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["name"] = s.name;
  d["mode"] = s.mode;
  d["termination"] = s.termination;
  d["exit_code"] = s.exit_code;
  d["steps"] = s.steps;
  py::list checks;
  for (const auto& c : s.checks) checks.append(py::make_tuple(c.name, c.passed, c.detail));
  d["checks"] = checks;
  py::dict cols;
  std::vector<double> t, mass, momentum, energy, u_diam, lam;
  for (const auto& r : s.records) {
    t.push_back(r.t);
    mass.push_back(r.mass);
    momentum.push_back(r.momentum);
    energy.push_back(r.energy);
    u_diam.push_back(r.u_diam);
    lam.push_back(r.lambda2);
  }
  cols["t"] = to_array(t);
  cols["mass"] = to_array(mass);
  cols["momentum"] = to_array(momentum);
  cols["energy"] = to_array(energy);
  cols["u_diam"] = to_array(u_diam);
  cols["lambda2"] = to_array(lam);
  d["diagnostics"] = cols;
  py::list children;
  for (const auto& c : s.children) children.append(summary_dict(c));
  d["children"] = children;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topological alignment kernels, singular operators and flocking solvers";

  auto base = py::register_exception<Error>(m, "TopoflockError");
  py::register_exception<ConfigInvalid>(m, "ConfigInvalid", base.ptr());

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](const std::string& family, double alpha, double tau, double r0, const std::string& cutoff,
                       double amplitude) {
             KernelSpec s;
             s.family = kernel_family_from_string(family);
             s.alpha = alpha;
             s.tau = tau;
             s.r0 = r0;
             s.cutoff = cutoff_shape_from_string(cutoff);
             s.amplitude = amplitude;
             return s;
           }),
           py::arg("family") = "topological", py::arg("alpha") = 1.2, py::arg("tau") = 1.0,
           py::arg("r0") = KernelSpec{}.r0, py::arg("cutoff") = "smooth-cos2", py::arg("amplitude") = 1.0)
      .def_property_readonly("family", [](const KernelSpec& s) { return to_string(s.family); })
      .def_readwrite("alpha", &KernelSpec::alpha)
      .def_readwrite("tau", &KernelSpec::tau)
      .def_readwrite("r0", &KernelSpec::r0)
      .def_readwrite("amplitude", &KernelSpec::amplitude)
      .def("phi", [](const KernelSpec& s, double r, double d) { return eval_phi(s, r, d); }, py::arg("r"),
           py::arg("d"));

  m.def("topo_distance",
        [](const Array& rho, double x, double y, double length) { return topo_distance_1d(density(rho, length), x, y); },
        py::arg("rho"), py::arg("x"), py::arg("y"), py::arg("length") = kTwoPi);
  m.def("region_contains",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& z, double length) {
          return region_contains(x, y, z, length);
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("length") = kTwoPi);

  m.def("eval_L",
        [](const Array& f, const Array& rho, const KernelSpec& spec, double length, double r,
           const std::string& quadrature) {
          return to_array(eval_Lphi(to_vec(f), density(rho, length), spec, operator_options(r, quadrature)).values);
        },
        py::arg("f"), py::arg("rho"), py::arg("spec") = KernelSpec{}, py::arg("length") = kTwoPi,
        py::arg("r") = 0.0, py::arg("quadrature") = "corrected");
  m.def("eval_commutator",
        [](const Array& rho, const Array& f, const KernelSpec& spec, double length, double r,
           const std::string& quadrature) {
          return to_array(
              eval_commutator(density(rho, length), to_vec(f), spec, operator_options(r, quadrature)).values);
        },
        py::arg("rho"), py::arg("f"), py::arg("spec") = KernelSpec{}, py::arg("length") = kTwoPi,
        py::arg("r") = 0.0, py::arg("quadrature") = "corrected");

  m.def("lambda2",
        [](const Array& rho, const KernelSpec& spec, double length) {
          const auto rep = lambda2(density(rho, length), spec);
          py::dict d;
          d["lambda2"] = rep.lambda2;
          d["mu"] = rep.mu;
          d["eigvec2"] = to_array(rep.eigvec2);
          d["residual"] = rep.residual;
          return d;
        },
        py::arg("rho"), py::arg("spec") = KernelSpec{}, py::arg("length") = kTwoPi);

  m.def("hydro_integrate",
        [](const Array& rho, const Array& u, const KernelSpec& spec, double t_final, double output_interval,
           double length) {
          const DensityField r = density(rho, length);
          const HydroState init = HydroState::from(0.0, r, VelocityField{r.grid(), to_vec(u)});
          HydroRunOptions opt;
          opt.t_final = t_final;
          opt.output_interval = output_interval;
          std::vector<double> times;
          std::vector<std::vector<double>> rhos, us;
          std::string termination;
          std::size_t steps = 0;
          {
            py::gil_scoped_release release;
            const auto res = integrate(init, spec, opt, [&](const HydroState& s) {
              times.push_back(s.t);
              rhos.emplace_back(s.rho.values().begin(), s.rho.values().end());
              us.push_back(s.u().values);
            });
            termination = res.termination;
            steps = res.steps;
          }
          py::list rl, ul;
          for (const auto& v : rhos) rl.append(to_array(v));
          for (const auto& v : us) ul.append(to_array(v));
          py::dict d;
          d["t"] = to_array(times);
          d["rho"] = rl;
          d["u"] = ul;
          d["termination"] = termination;
          d["steps"] = steps;
          return d;
        },
        py::arg("rho"), py::arg("u"), py::arg("spec") = KernelSpec{}, py::arg("t_final") = 1.0,
        py::arg("output_interval") = 0.5, py::arg("length") = kTwoPi);

  m.def("swarm_step",
        [](const Array& x, const Array& v, int dim, const KernelSpec& spec, double dt, double length) {
          const SwarmState st{0.0, AgentSwarm(dim, length, to_vec(x), to_vec(v))};
          const auto adv = swarm_advance(st, spec, dt);
          return py::make_tuple(to_array(adv.state.swarm.positions), to_array(adv.state.swarm.velocities),
                                adv.dt_used);
        },
        py::arg("x"), py::arg("v"), py::arg("dim") = 1, py::arg("spec") = KernelSpec{}, py::arg("dt") = 0.01,
        py::arg("length") = kTwoPi);

  m.def("preset_names", &preset_names);
  m.def("preset_config", [](const std::string& name) { return serialize_config(preset_config(name)); },
        py::arg("name"), "Preset as INI text.");
  m.def("run_config",
        [](const std::string& ini, bool write_files) {
          const ExperimentConfig c = parse_config_string(ini);
          RunControls controls;
          controls.write_files = write_files;
          RunSummary s;
          {
            py::gil_scoped_release release;
            s = run_experiment(c, controls);
          }
          return summary_dict(s);
        },
        py::arg("ini"), py::arg("write_files") = false);
  m.attr("__version__") = version_string();
}
