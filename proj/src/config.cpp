#include "hemo/driver/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hemo/boundary.hpp"

namespace hemo::driver {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string strip(const std::string& s) {
  std::string v = s;
  for (const char* marker : {" #", "\t#", " ;", "\t;"}) {
    const auto pos = v.find(marker);
    if (pos != std::string::npos) v.erase(pos);
  }
  const auto b = v.find_first_not_of(" \t\r");
  const auto e = v.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
}

/// Typed access to one section, recording errors and unknown keys.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree, std::vector<std::string>& errors)
      : name_(std::move(name)), tree_(tree), errors_(errors) {}

  ~Section() {
    for (const auto& [key, _] : tree_) {
      if (!used_.count(key)) errors_.push_back("[" + name_ + "] unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return strip(it->second.data());
  }

  std::optional<double> number(const std::string& key) {
    auto s = text(key);
    if (!s) return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(*s, &used);
      if (used == s->size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    errors_.push_back("[" + name_ + "] " + key + ": expected a number, got '" + *s + "'");
    return std::nullopt;
  }

  std::optional<long> integer(const std::string& key) {
    auto v = number(key);
    if (!v) return std::nullopt;
    if (std::floor(*v) != *v) {
      errors_.push_back("[" + name_ + "] " + key + ": expected an integer");
      return std::nullopt;
    }
    return static_cast<long>(*v);
  }

  std::optional<Eigen::Vector3d> vector3(const std::string& key) {
    auto s = text(key);
    if (!s) return std::nullopt;
    std::istringstream is(*s);
    Eigen::Vector3d v;
    if (is >> v.x() >> v.y() >> v.z() && (is >> std::ws).eof()) return v;
    errors_.push_back("[" + name_ + "] " + key + ": expected three numbers");
    return std::nullopt;
  }

  template <typename T>
  void set(const std::string& key, T& target) {
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = number(key)) target = *v;
    } else if constexpr (std::is_integral_v<T>) {
      if (auto v = integer(key)) target = static_cast<T>(*v);
    } else {
      if (auto v = text(key)) target = *v;
    }
  }

  std::optional<double> required(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      errors_.push_back("[" + name_ + "] missing required key '" + key + "'");
      return std::nullopt;
    }
    return number(key);
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

bool is_boundary_name(const std::string& s) {
  for (const char* prefix : {"inlet", "outlet"}) {
    const std::string pre(prefix);
    if (s.size() > pre.size() && s.compare(0, pre.size(), pre) == 0 &&
        s.find_first_not_of("0123456789", pre.size()) == std::string::npos) {
      return true;
    }
  }
  return false;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

long RunConfig::total_steps() const {
  if (steps) return *steps;
  return static_cast<long>(std::llround(cycles * cycle_period / dt));
}

int RunConfig::effective_sample_every() const {
  if (sample_every > 0) return sample_every;
  const double per_cycle = cycle_period / dt;
  return std::max(1, static_cast<int>(std::floor(per_cycle / 500.0)));
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("config syntax: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  std::vector<std::string> errors;
  RunConfig c;
  c.source_text = text;
  const pt::ptree empty;
  auto child = [&](const std::string& name) -> const pt::ptree& {
    auto it = tree.find(name);
    return it == tree.not_found() ? empty : it->second;
  };

  for (const auto& [name, sub] : tree) {
    const bool known = name == "geometry" || name == "lattice" || name == "rheology" ||
                       name == "run" || name == "boundary" || name == "tbd" ||
                       is_boundary_name(name) || name.rfind("sample.", 0) == 0;
    if (!known) errors.push_back("unknown section [" + name + "]");
    if (!sub.data().empty()) errors.push_back("key '" + name + "' outside of any section");
  }

  {
    Section g("geometry", child("geometry"), errors);
    const std::string type = g.text("type").value_or("");
    auto& geo = c.geometry;
    if (type == "channel") {
      geo.kind = GeometryConfig::Kind::Channel;
      if (auto v = g.required("length")) geo.length = *v;
      if (auto v = g.required("height")) geo.height = *v;
      g.set("depth", geo.depth);
    } else if (type == "cylinder") {
      geo.kind = GeometryConfig::Kind::Cylinder;
      if (auto v = g.required("length")) geo.length = *v;
      if (auto v = g.required("radius")) geo.radius = *v;
    } else if (type == "bifurcation") {
      geo.kind = GeometryConfig::Kind::Bifurcation;
      auto& b = geo.bifurcation;
      g.set("parent_radius", b.parent_radius);
      g.set("parent_length", b.parent_length);
      g.set("daughter0_radius", b.daughter_radii[0]);
      g.set("daughter1_radius", b.daughter_radii[1]);
      g.set("daughter0_length", b.daughter_lengths[0]);
      g.set("daughter1_length", b.daughter_lengths[1]);
      if (auto v = g.number("angle_deg")) b.angle = *v * std::numbers::pi / 180.0;
      g.set("blend", b.blend);
    } else if (type == "mesh") {
      geo.kind = GeometryConfig::Kind::Mesh;
      if (auto v = g.text("mesh")) geo.mesh = resolve(base_dir, *v);
      else errors.push_back("[geometry] missing required key 'mesh'");
      if (auto v = g.text("caps")) geo.caps = resolve(base_dir, *v);
      else errors.push_back("[geometry] missing required key 'caps'");
      g.set("scale", geo.mesh_scale);
    } else if (type == "voxel") {
      geo.kind = GeometryConfig::Kind::Voxel;
      if (auto v = g.text("file")) geo.voxel_file = resolve(base_dir, *v);
      else errors.push_back("[geometry] missing required key 'file'");
    } else {
      errors.push_back("[geometry] type must be one of channel, cylinder, bifurcation, mesh, voxel");
    }
  }

  {
    Section l("lattice", child("lattice"), errors);
    if (auto v = l.required("dx")) c.dx = *v;
    if (auto v = l.required("dt")) c.dt = *v;
    l.set("rho", c.rho);
  }

  {
    Section r("rheology", child("rheology"), errors);
    const std::string model = r.text("model").value_or("newtonian");
    if (model == "newtonian") {
      rheology::Newtonian m;
      r.set("eta", m.eta);
      c.rheology = m;
    } else if (model == "carreau-yasuda") {
      rheology::CarreauYasuda m;
      r.set("eta0", m.eta0);
      r.set("eta_inf", m.eta_inf);
      r.set("lambda", m.lambda);
      r.set("a", m.a);
      r.set("n", m.n);
      c.rheology = m;
    } else {
      errors.push_back("[rheology] model must be 'newtonian' or 'carreau-yasuda'");
    }
    r.set("tau_tolerance", c.tau_solver.rel_tolerance);
    r.set("tau_max_iterations", c.tau_solver.max_iterations);
  }

  {
    Section b("boundary", child("boundary"), errors);
    b.set("reference", c.reference);
  }

  for (const auto& [name, sub] : tree) {
    if (!is_boundary_name(name)) continue;
    Section s(name, sub, errors);
    TraceConfig t;
    t.boundary = name;
    if (auto f = s.text("trace")) t.file = resolve(base_dir, *f);
    s.set("preset", t.preset);
    s.set("mean_pa", t.mean);
    s.set("amplitude_pa", t.amplitude);
    s.set("delay_s", t.delay);
    if (t.file.empty() == t.preset.empty()) {
      errors.push_back("[" + name + "] exactly one of 'trace' or 'preset' is required");
    }
    c.traces.push_back(t);
  }

  for (const auto& [name, sub] : tree) {
    if (name.rfind("sample.", 0) != 0) continue;
    Section s(name, sub, errors);
    SamplePointConfig p;
    p.name = name.substr(7);
    if (p.name.empty() || p.name.find_first_of("/\\ ") != std::string::npos) {
      errors.push_back("[" + name + "] sample names must be non-empty without spaces or slashes");
    }
    if (auto v = s.vector3("position")) p.position = *v;
    else errors.push_back("[" + name + "] missing required key 'position'");
    c.samples.push_back(p);
  }

  {
    Section r("run", child("run"), errors);
    r.set("cycles", c.cycles);
    r.set("period", c.cycle_period);
    if (auto v = r.integer("steps")) c.steps = *v;
    if (auto v = r.text("output")) c.output_dir = resolve(base_dir, *v);
    r.set("sample_every", c.sample_every);
    r.set("snapshots_per_cycle", c.snapshots_per_cycle);
    r.set("checkpoint_every", c.checkpoint_every);
    r.set("report_every", c.report_every);
    r.set("threads", c.threads);
    r.set("partitions", c.partitions);
    r.set("max_mach", c.max_mach);
    r.set("max_density_variation", c.max_density_variation);
    r.set("snap_distance", c.snap_distance);
  }

  {
    Section t("tbd", child("tbd"), errors);
    t.set("sigma_points", c.sigma_points);
    if (auto v = t.number("sigma_max")) c.sigma_max = *v;
    const std::string ep = t.text("endpoints").value_or("circular");
    if (ep == "circular") c.endpoints = tbd::Endpoints::Circular;
    else if (ep == "open") c.endpoints = tbd::Endpoints::Open;
    else errors.push_back("[tbd] endpoints must be 'circular' or 'open'");
  }

  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError({"cannot open configuration file " + path.string()});
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  os << "cs_phys = " << cs_phys << " m/s\n";
  os << "tau = " << tau;
  if (tau_max) os << " (eta_inf) .. " << *tau_max << " (eta0)";
  os << "\n";
  os << "steps = " << steps << "\n";
  os << "predicted Mach bound = " << predicted_mach << "\n";
  os << "memory estimate = " << memory_bytes / (1024.0 * 1024.0) << " MiB\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  for (const auto& e : errors) os << "error: " << e << "\n";
  return os.str();
}

ValidationReport validate(const RunConfig& c) {
  ValidationReport r;
  auto& err = r.errors;
  if (!(c.dx > 0.0)) err.push_back("dx must be > 0");
  if (!(c.dt > 0.0)) err.push_back("dt must be > 0");
  if (!(c.rho > 0.0)) err.push_back("rho must be > 0");
  if (!c.steps && c.cycles < 1) err.push_back("cycles must be >= 1");
  if (c.steps && *c.steps < 1) err.push_back("steps must be >= 1");
  if (!(c.cycle_period > 0.0)) err.push_back("period must be > 0");
  if (c.threads < 1) err.push_back("threads must be >= 1");
  if (c.partitions < 0) err.push_back("partitions must be >= 0");
  if (c.sample_every < 0) err.push_back("sample_every must be >= 0");
  if (c.snapshots_per_cycle < 0) err.push_back("snapshots_per_cycle must be >= 0");
  if (c.report_every < 1) err.push_back("report_every must be >= 1");
  if (c.sigma_points < 2) err.push_back("sigma_points must be >= 2");
  try {
    rheology::validate(c.rheology);
  } catch (const std::exception& e) {
    err.push_back(e.what());
  }

  if (c.dx > 0.0 && c.dt > 0.0 && c.rho > 0.0) {
    const rheology::LatticeScaling s(c.dt, c.dx, c.rho);
    r.cs_phys = s.cs();
    if (err.empty()) {
      const double eta_lo = std::visit([](auto& m) { return m.min_viscosity(); }, c.rheology);
      const double eta_hi = std::visit([](auto& m) { return m.max_viscosity(); }, c.rheology);
      r.tau = rheology::relaxation_time(eta_lo, s);
      if (eta_hi != eta_lo) r.tau_max = rheology::relaxation_time(eta_hi, s);
      if (!(r.tau > 0.5)) {
        std::ostringstream os;
        os << "relaxation time " << r.tau << " <= 0.5: increase dt or decrease dx";
        err.push_back(os.str());
      }
    }
    r.steps = c.steps ? *c.steps : (c.cycles > 0 ? c.total_steps() : 0);

    double pmin = 0.0, pmax = 0.0;
    bool first = true;
    for (const auto& t : c.traces) {
      if (!t.file.empty()) {
        if (!std::filesystem::exists(t.file)) {
          err.push_back("[" + t.boundary + "] trace file not found: " + t.file.string());
          continue;
        }
        try {
          const auto trace = boundary::read_trace_csv(t.file, c.cycle_period);
          for (double p : trace.pressures) {
            pmin = first ? p : std::min(pmin, p);
            pmax = first ? p : std::max(pmax, p);
            first = false;
          }
        } catch (const std::exception& e) {
          err.push_back("[" + t.boundary + "] " + e.what());
        }
      } else {
        try {
          const auto trace = boundary::generate_waveform(
              boundary::waveform_preset(t.preset, t.mean, t.amplitude, c.cycle_period, t.delay));
          for (double p : trace.pressures) {
            pmin = first ? p : std::min(pmin, p);
            pmax = first ? p : std::max(pmax, p);
            first = false;
          }
        } catch (const std::exception& e) {
          err.push_back("[" + t.boundary + "] " + e.what());
        }
      }
    }
    // Bernoulli bound on the speed a pressure difference can drive.
    const double u = std::sqrt(2.0 * std::max(0.0, pmax - pmin) / c.rho);
    r.predicted_mach = u / s.cs();
    if (r.predicted_mach >= c.max_mach) {
      std::ostringstream os;
      os << "predicted Mach bound " << r.predicted_mach << " is not below " << c.max_mach
         << " (inviscid estimate; viscous flow is usually much slower)";
      r.warnings.push_back(os.str());
    }
    const double density_span = (pmax - pmin) / (s.cs2() * c.rho);
    if (density_span > 0.02) {
      std::ostringstream os;
      os << "pressure span implies a density variation of " << density_span;
      r.warnings.push_back(os.str());
    }
  }

  if (c.geometry.kind == GeometryConfig::Kind::Mesh) {
    if (!std::filesystem::exists(c.geometry.mesh))
      err.push_back("mesh file not found: " + c.geometry.mesh.string());
    if (!std::filesystem::exists(c.geometry.caps))
      err.push_back("cap file not found: " + c.geometry.caps.string());
  }
  if (c.geometry.kind == GeometryConfig::Kind::Voxel &&
      !std::filesystem::exists(c.geometry.voxel_file)) {
    err.push_back("voxel file not found: " + c.geometry.voxel_file.string());
  }

  // Memory: populations (two buffers), tau, neighbour table, per bounding-box site.
  if (c.dx > 0.0) {
    double volume = 0.0;
    const auto& g = c.geometry;
    switch (g.kind) {
      case GeometryConfig::Kind::Channel:
        volume = g.length * g.height * std::max(g.depth, c.dx);
        break;
      case GeometryConfig::Kind::Cylinder:
        volume = g.length * 4.0 * g.radius * g.radius;
        break;
      case GeometryConfig::Kind::Bifurcation: {
        try {
          const auto [lo, hi] = geometry::make_bifurcation_shape(g.bifurcation)->bounds();
          volume = (hi - lo).prod();
        } catch (const std::exception& e) {
          err.push_back(e.what());
        }
        break;
      }
      default:
        break;
    }
    const double sites = volume / (c.dx * c.dx * c.dx);
    constexpr double bytes_per_site = 2 * 15 * 8 + 8 + 15 * 4 + 16;
    r.memory_bytes = sites * bytes_per_site;
  }
  return r;
}

}  // namespace hemo::driver
