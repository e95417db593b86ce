#include "topoflock/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <set>
#include <type_traits>
#include <sstream>

#include "topoflock/errors.hpp"

namespace topoflock {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

// Reads typed values out of the flat map and collects every problem.
class Reader {
 public:
  explicit Reader(const KeyValues& values) : values_(values) {}

  void real(const std::string& key, double& out) {
    with(key, [&](const std::string& v) {
      std::size_t pos = 0;
      out = std::stod(v, &pos);
      return pos == v.size();
    }, "a real number");
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    with(key, [&](const std::string& v) {
      std::size_t pos = 0;
      const long long parsed = std::stoll(v, &pos);
      if (pos != v.size()) return false;
      if constexpr (std::is_unsigned_v<Int>) {
        if (parsed < 0) return false;
      }
      out = static_cast<Int>(parsed);
      return true;
    }, "an integer");
  }

  void boolean(const std::string& key, bool& out) {
    with(key, [&](const std::string& v) {
      if (v == "true" || v == "1" || v == "yes" || v == "on") {
        out = true;
        return true;
      }
      if (v == "false" || v == "0" || v == "no" || v == "off") {
        out = false;
        return true;
      }
      return false;
    }, "a boolean");
  }

  void text(const std::string& key, std::string& out) {
    with(key, [&](const std::string& v) {
      out = v;
      return true;
    }, "text");
  }

  template <class T>
  void named(const std::string& key, T& out, T (*convert)(const std::string&)) {
    with(key, [&](const std::string& v) {
      out = convert(v);
      return true;
    }, "a known name");
  }

  void fail(const std::string& message) { violations_.push_back(message); }
  std::vector<std::string>& violations() { return violations_; }
  const std::set<std::string>& used() const { return used_; }

 private:
  template <class Parse>
  void with(const std::string& key, Parse parse, const char* what) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    used_.insert(key);
    try {
      if (!parse(trim(it->second))) violations_.push_back(key + " must be " + what);
    } catch (const std::exception&) {
      violations_.push_back(key + " must be " + what + " (got '" + it->second + "')");
    }
  }

  const KeyValues& values_;
  std::vector<std::string> violations_;
  std::set<std::string> used_;
};

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kHydro1d: return "hydro1d";
    case RunMode::kAgents: return "agents";
    case RunMode::kSpectralOnly: return "spectral-only";
    case RunMode::kSweep: return "sweep";
  }
  return "unknown";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "hydro1d") return RunMode::kHydro1d;
  if (name == "agents") return RunMode::kAgents;
  if (name == "spectral-only") return RunMode::kSpectralOnly;
  if (name == "sweep") return RunMode::kSweep;
  throw Error("unknown run mode '" + name + "'");
}

KeyValues to_key_values(const ExperimentConfig& c) {
  KeyValues kv;
  kv["run.mode"] = to_string(c.mode);
  kv["run.name"] = c.name;
  kv["run.t_final"] = format_double(c.t_final);
  kv["run.seed"] = std::to_string(c.seed);
  kv["grid.n_cells"] = std::to_string(c.n_cells);
  kv["grid.length"] = format_double(c.length);
  kv["kernel.family"] = to_string(c.kernel.family);
  kv["kernel.alpha"] = format_double(c.kernel.alpha);
  kv["kernel.tau"] = format_double(c.kernel.tau);
  kv["kernel.r0"] = format_double(c.kernel.r0);
  kv["kernel.cutoff"] = to_string(c.kernel.cutoff);
  kv["kernel.amplitude"] = format_double(c.kernel.amplitude);
  kv["numerics.cfl"] = format_double(c.numerics.cfl);
  kv["numerics.quadrature"] = to_string(c.numerics.quadrature);
  kv["numerics.derivative"] = to_string(c.numerics.derivative);
  kv["numerics.second_order"] = c.numerics.second_order ? "true" : "false";
  const InitialDataSpec& i = c.initial;
  kv["initial.kind"] = to_string(i.kind);
  kv["initial.rho_bar"] = format_double(i.rho_bar);
  kv["initial.u_bar"] = format_double(i.u_bar);
  kv["initial.amp"] = format_double(i.amp);
  kv["initial.k"] = std::to_string(i.k);
  kv["initial.vel_amp"] = format_double(i.vel_amp);
  kv["initial.m"] = std::to_string(i.m);
  kv["initial.phase"] = format_double(i.phase);
  kv["initial.bump_width"] = format_double(i.bump_width);
  kv["initial.bump_center1"] = format_double(i.bump_center1);
  kv["initial.bump_center2"] = format_double(i.bump_center2);
  kv["initial.e0_free"] = c.e0_free ? "true" : "false";
  if (!c.samples_path.empty()) kv["initial.samples"] = c.samples_path;
  kv["output.dir"] = c.out_dir;
  kv["output.interval"] = format_double(c.output_interval);
  kv["output.lambda2"] = c.lambda2 ? "true" : "false";
  kv["output.snapshots"] = c.snapshots ? "true" : "false";
  kv["agents.count"] = std::to_string(c.agent_count);
  kv["agents.dim"] = std::to_string(c.agent_dim);
  kv["agents.dt"] = format_double(c.agent_dt);
  kv["agents.convention"] = to_string(c.agent_options.convention);
  kv["agents.r_floor"] = format_double(c.agent_options.r_floor);
  kv["agents.stability_bound"] = format_double(c.agent_options.stability_bound);
  if (c.mode == RunMode::kSweep || !c.sweep.empty()) {
    kv["sweep.mode"] = to_string(c.sweep_mode);
    kv["sweep.workers"] = std::to_string(c.workers);
    for (const auto& [key, list] : c.sweep) kv["sweep." + key] = join_list(list);
  }
  return kv;
}

ExperimentConfig from_key_values(const KeyValues& values) {
  ExperimentConfig c;
  Reader r(values);
  r.named("run.mode", c.mode, run_mode_from_string);
  r.text("run.name", c.name);
  r.real("run.t_final", c.t_final);
  r.integer("run.seed", c.seed);
  r.integer("grid.n_cells", c.n_cells);
  r.real("grid.length", c.length);
  r.named("kernel.family", c.kernel.family, kernel_family_from_string);
  r.real("kernel.alpha", c.kernel.alpha);
  r.real("kernel.tau", c.kernel.tau);
  r.real("kernel.r0", c.kernel.r0);
  r.named("kernel.cutoff", c.kernel.cutoff, cutoff_shape_from_string);
  r.real("kernel.amplitude", c.kernel.amplitude);
  r.real("numerics.cfl", c.numerics.cfl);
  r.named("numerics.quadrature", c.numerics.quadrature, quadrature_from_string);
  r.named("numerics.derivative", c.numerics.derivative, derivative_method_from_string);
  r.boolean("numerics.second_order", c.numerics.second_order);
  InitialDataSpec& i = c.initial;
  r.named("initial.kind", i.kind, initial_kind_from_string);
  r.real("initial.rho_bar", i.rho_bar);
  r.real("initial.u_bar", i.u_bar);
  r.real("initial.amp", i.amp);
  r.integer("initial.k", i.k);
  r.real("initial.vel_amp", i.vel_amp);
  r.integer("initial.m", i.m);
  r.real("initial.phase", i.phase);
  r.real("initial.bump_width", i.bump_width);
  r.real("initial.bump_center1", i.bump_center1);
  r.real("initial.bump_center2", i.bump_center2);
  r.boolean("initial.e0_free", c.e0_free);
  r.text("initial.samples", c.samples_path);
  r.text("output.dir", c.out_dir);
  r.real("output.interval", c.output_interval);
  r.boolean("output.lambda2", c.lambda2);
  r.boolean("output.snapshots", c.snapshots);
  r.integer("agents.count", c.agent_count);
  r.integer("agents.dim", c.agent_dim);
  r.real("agents.dt", c.agent_dt);
  r.named("agents.convention", c.agent_options.convention, weight_convention_from_string);
  r.real("agents.r_floor", c.agent_options.r_floor);
  r.real("agents.stability_bound", c.agent_options.stability_bound);
  r.named("sweep.mode", c.sweep_mode, run_mode_from_string);
  r.integer("sweep.workers", c.workers);

  for (const auto& [key, value] : values) {
    if (r.used().count(key)) continue;
    if (key.rfind("sweep.", 0) == 0) {
      const std::string target = key.substr(6);
      if (target.find('.') == std::string::npos || target.rfind("sweep.", 0) == 0) {
        r.fail("sweep key '" + target + "' must name a section.key");
        continue;
      }
      auto list = split_list(value);
      if (list.empty()) {
        r.fail("sweep key '" + target + "' needs at least one value");
        continue;
      }
      c.sweep.emplace_back(target, std::move(list));
      continue;
    }
    r.fail("unknown key '" + key + "'");
  }

  auto& v = r.violations();
  if (c.n_cells < Grid1D::kMinCells) v.push_back("grid.n_cells must be at least 8");
  if (!(c.length > 0.0)) v.push_back("grid.length must be positive");
  for (auto& msg : c.kernel.violations(c.length)) v.push_back(msg);
  if (!(c.numerics.cfl > 0.0 && c.numerics.cfl <= 1.0)) v.push_back("numerics.cfl must lie in (0,1]");
  if (!(c.t_final >= 0.0)) v.push_back("run.t_final must be nonnegative");
  if (!(c.output_interval > 0.0)) v.push_back("output.interval must be positive");
  if (!(i.rho_bar > 0.0)) v.push_back("initial.rho_bar must be positive");
  if (i.kind == InitialKind::kPerturbedSine && !(std::abs(i.amp) < 1.0)) {
    v.push_back("initial.amp must satisfy |amp| < 1 for perturbed-sine");
  }
  if (i.kind == InitialKind::kTwoBump && !(i.amp > -0.5 && i.bump_width > 0.0)) {
    v.push_back("two-bump needs amp > -1/2 and a positive bump_width");
  }
  const bool needs_samples = i.kind == InitialKind::kCustomSamples || c.mode == RunMode::kSpectralOnly;
  if (needs_samples && c.samples_path.empty()) v.push_back("initial.samples is required for this run");
  if (c.agent_count < 2) v.push_back("agents.count must be at least 2");
  if (c.agent_dim != 1 && c.agent_dim != 2) v.push_back("agents.dim must be 1 or 2");
  if (!(c.agent_dt > 0.0)) v.push_back("agents.dt must be positive");
  if (!(c.agent_options.r_floor >= 0.0)) v.push_back("agents.r_floor must be nonnegative");
  if (c.mode == RunMode::kSweep) {
    if (c.sweep.empty()) v.push_back("sweep mode needs at least one [sweep] list");
    if (c.sweep_mode == RunMode::kSweep) v.push_back("sweep.mode cannot itself be sweep");
    if (c.workers < 1) v.push_back("sweep.workers must be at least 1");
  }
  if (!v.empty()) throw ConfigInvalid(v);
  return c;
}

std::string serialize_config(const ExperimentConfig& config) {
  const KeyValues kv = to_key_values(config);
  static const std::vector<std::string> order = {"run",     "grid",   "kernel", "numerics",
                                                 "initial", "output", "agents", "sweep"};
  std::ostringstream os;
  for (const auto& section : order) {
    bool opened = false;
    for (const auto& [key, value] : kv) {
      const auto dot = key.find('.');
      if (key.substr(0, dot) != section) continue;
      if (!opened) {
        if (os.tellp() > 0) os << '\n';
        os << '[' << section << "]\n";
        opened = true;
      }
      os << key.substr(dot + 1) << " = " << value << '\n';
    }
  }
  return os.str();
}

ExperimentConfig parse_config_string(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigInvalid({std::string("malformed config: ") + e.message() + " (line " +
                         std::to_string(e.line()) + ")"});
  }
  KeyValues kv;
  std::vector<std::string> loose;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      loose.push_back("key '" + section + "' must be inside a section");
      continue;
    }
    for (const auto& [key, value] : node) kv[section + "." + key] = value.data();
  }
  if (!loose.empty()) throw ConfigInvalid(loose);
  return from_key_values(kv);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid({"cannot read config file '" + path + "'"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_string(buffer.str());
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  if (config.sweep.empty()) return {config};
  KeyValues base = to_key_values(config);
  for (auto it = base.begin(); it != base.end();) {
    it = it->first.rfind("sweep.", 0) == 0 ? base.erase(it) : std::next(it);
  }
  base["run.mode"] = to_string(config.sweep_mode);

  std::vector<ExperimentConfig> children;
  std::vector<std::size_t> index(config.sweep.size(), 0);
  for (;;) {
    KeyValues kv = base;
    std::string label;
    for (std::size_t s = 0; s < config.sweep.size(); ++s) {
      const auto& [key, list] = config.sweep[s];
      kv[key] = list[index[s]];
      label += (label.empty() ? "" : "_") + key.substr(key.find('.') + 1) + "-" + list[index[s]];
    }
    kv["run.name"] = config.name + "/" + label;
    kv["output.dir"] = config.out_dir + "/" + label;
    children.push_back(from_key_values(kv));
    std::size_t s = 0;
    while (s < index.size() && ++index[s] == config.sweep[s].second.size()) index[s++] = 0;
    if (s == index.size()) break;
  }
  return children;
}

std::vector<std::string> preset_names() { return {"thm12-rootlog", "e0-flocking", "kernel-compare"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.kernel = KernelSpec{};
  c.initial.kind = InitialKind::kPerturbedSine;
  c.initial.amp = 0.5;
  c.initial.vel_amp = 1.0;
  c.t_final = 10.0;
  c.output_interval = 0.5;
  if (name == "thm12-rootlog") {
    c.out_dir = "out/thm12-rootlog";
    return c;
  }
  if (name == "e0-flocking") {
    c.e0_free = true;
    c.out_dir = "out/e0-flocking";
    return c;
  }
  if (name == "kernel-compare") {
    c.mode = RunMode::kSweep;
    c.sweep_mode = RunMode::kHydro1d;
    c.sweep = {{"kernel.family", {"topological", "geometric", "motsch-tadmor"}}};
    c.out_dir = "out/kernel-compare";
    return c;
  }
  throw ConfigInvalid({"unknown preset '" + name + "'"});
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace topoflock
