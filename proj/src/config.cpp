#include "scatterlab/config.hpp"

#include <filesystem>
#include <set>

#include "json.hpp"
#include "scatterlab/io.hpp"

namespace scatterlab::config {

using json = nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
  return s;
}

struct Ctx {
  std::vector<std::string> errs;
  std::string base_dir;
};

// One JSON object being read. Keys read through it are remembered, the rest
// are reported as unknown by done().
class Sec {
 public:
  Sec(const json* j, std::string path, Ctx& c) : j_(j), path_(std::move(path)), c_(c) {
    if (j_ && !j_->is_object()) {
      err("", "must be an object");
      j_ = nullptr;
    }
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (!j_) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  void err(const std::string& key, const std::string& msg) {
    std::string p = path_;
    if (!key.empty()) p += (p.empty() ? "" : ".") + key;
    c_.errs.push_back((p.empty() ? "config" : p) + ": " + msg);
  }

  std::string sub_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  Ctx& ctx() { return c_; }

  double num(const std::string& key, double def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number()) {
      err(key, "expected a number");
      return def;
    }
    return v->get<double>();
  }

  int integer(const std::string& key, int def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_number_integer()) {
      err(key, "expected an integer");
      return def;
    }
    return v->get<int>();
  }

  bool flag(const std::string& key, bool def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_boolean()) {
      err(key, "expected true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string str(const std::string& key, const std::string& def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_string()) {
      err(key, "expected a string");
      return def;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = raw(key);
    if (!v) return def;
    if (!v->is_array()) {
      err(key, "expected an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) {
        err(key, "expected an array of numbers");
        return def;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) err(key, msg);
  }

  void done() {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) err(it.key(), "unknown key");
  }

 private:
  const json* j_;
  std::string path_;
  Ctx& c_;
  std::set<std::string> seen_;
};

bool as_vec2(const json& j, Vec2& out) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return false;
  out = {j[0].get<double>(), j[1].get<double>()};
  return true;
}

// number or [re, im]
bool as_cplx(const json& j, cplx& out) {
  if (j.is_number()) {
    out = {j.get<double>(), 0.0};
    return true;
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) return false;
  out = {j[0].get<double>(), j[1].get<double>()};
  return true;
}

Vec2 read_vec2(Sec& s, const std::string& key, Vec2 def) {
  const json* v = s.raw(key);
  if (!v) return def;
  Vec2 out;
  if (!as_vec2(*v, out)) {
    s.err(key, "expected [x, y]");
    return def;
  }
  return out;
}

cplx read_cplx(Sec& s, const std::string& key, cplx def) {
  const json* v = s.raw(key);
  if (!v) return def;
  cplx out;
  if (!as_cplx(*v, out)) {
    s.err(key, "expected a number or [re, im]");
    return def;
  }
  return out;
}

std::vector<std::pair<int, cplx>> read_modes(Sec& s, const std::string& key,
                                             std::vector<std::pair<int, cplx>> def) {
  const json* v = s.raw(key);
  if (!v) return def;
  std::vector<std::pair<int, cplx>> out;
  bool ok = v->is_array();
  if (ok)
    for (const auto& m : *v) {
      if (!m.is_array() || m.size() != 3 || !m[0].is_number_integer() || !m[1].is_number() ||
          !m[2].is_number()) {
        ok = false;
        break;
      }
      out.emplace_back(m[0].get<int>(), cplx(m[1].get<double>(), m[2].get<double>()));
    }
  if (!ok) {
    s.err(key, "expected [[n, re, im], ...]");
    return def;
  }
  return out;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
json vec_json(Vec2 v) { return json::array({v.x, v.y}); }
json modes_json(const std::vector<std::pair<int, cplx>>& m) {
  json a = json::array();
  for (const auto& [n, c] : m) a.push_back(json::array({n, c.real(), c.imag()}));
  return a;
}

// ---- sections ---------------------------------------------------------------

ScattererSpec read_scatterer(const json& j, const std::string& path, Ctx& c) {
  Sec s(&j, path, c);
  ScattererSpec o;
  o.shape = s.str("shape", o.shape);
  o.vacuum = s.flag("vacuum", false);
  o.gamma = s.num("gamma", o.vacuum ? 1.0 : o.gamma);
  o.q = s.num("q", o.vacuum ? 1.0 : o.q);
  if (o.vacuum && (o.gamma != 1.0 || o.q != 1.0)) s.err("vacuum", "requires gamma = q = 1");
  if (!(o.q > 0)) s.err("q", "must be > 0");
  if (!(o.gamma > 0)) s.err("gamma", "must be > 0");
  if (o.shape == "polygon") {
    const json* v = s.raw("vertices");
    const std::string file = s.str("polygon_file", "");
    if (v && !file.empty()) s.err("polygon_file", "give either vertices or polygon_file");
    if (v) {
      bool ok = v->is_array();
      if (ok)
        for (const auto& p : *v) {
          Vec2 x;
          if (!as_vec2(p, x)) {
            ok = false;
            break;
          }
          o.vertices.push_back(x);
        }
      if (!ok) s.err("vertices", "expected [[x, y], ...]");
    } else if (!file.empty()) {
      namespace fs = std::filesystem;
      fs::path fp(file);
      if (fp.is_relative()) fp = fs::path(c.base_dir) / fp;
      try {
        o.vertices = geometry::read_polygon(fp.string()).vertices();
      } catch (const std::exception& e) {
        s.err("polygon_file", e.what());
      }
    } else {
      s.err("vertices", "polygon needs vertices or polygon_file");
    }
    const bool c1 = s.raw("center"), c2 = s.raw("radius");
    if (c1 || c2) s.err("", "center/radius apply to circles only");
  } else if (o.shape == "circle") {
    o.center = read_vec2(s, "center", o.center);
    o.radius = s.num("radius", o.radius);
    if (!(o.radius > 0)) s.err("radius", "must be > 0");
    const bool p1 = s.raw("vertices"), p2 = s.raw("polygon_file");
    if (p1 || p2) s.err("", "vertices apply to polygons only");
  } else {
    s.err("shape", "expected polygon or circle");
  }
  s.done();
  return o;
}

void check_admissible(const ScattererSpec& o, const BoundsSpec& b, const std::string& path, Ctx& c) {
  std::vector<std::string> v;
  // gamma = 1 without the vacuum flag is reported by name; the geometry is
  // still checked through a stand-in contrast
  const bool unit = o.gamma == 1.0 && !o.vacuum;
  if (unit) v.push_back("gamma != 1 violated (no contrast in sigma)");
  try {
    ScattererSpec g = o;
    if (unit) g.gamma = 2.0;
    const auto sc = g.build();
    auto w = forward::scatterer_violations(sc, b.build());
    if (o.vacuum || unit) std::erase_if(w, [](const std::string& x) { return x.rfind("gamma", 0) == 0; });
    v.insert(v.end(), w.begin(), w.end());
    if (!sc.polygon()) {
      const double r = forward::shape_radius(sc.shape());
      if (r >= b.radius) v.push_back("circle not strictly inside B_R");
    }
  } catch (const std::exception& e) {
    v.push_back(e.what());
  }
  for (const auto& x : v) c.errs.push_back(path + ": " + x);
}

IncidentSpec read_incident(Sec& s) {
  IncidentSpec o;
  o.kind = s.str("kind", o.kind);
  o.k = s.num("k", o.k);
  s.require(o.k > 0, "k", "must be > 0");
  o.angle = s.num("angle", o.angle);
  o.amplitude = read_cplx(s, "amplitude", o.amplitude);
  o.directions = s.integer("directions", o.directions);
  o.modes = read_modes(s, "modes", {});
  if (const json* d = s.raw("density")) {
    bool ok = d->is_array();
    if (ok)
      for (const auto& x : *d) {
        cplx z;
        if (!as_cplx(x, z)) {
          ok = false;
          break;
        }
        o.density.push_back(z);
      }
    if (!ok) s.err("density", "expected [[re, im], ...]");
  }
  if (o.kind == "herglotz") {
    if (o.density.empty() == o.modes.empty()) s.err("density", "herglotz needs exactly one of density, modes");
    const std::size_t m = o.density.empty() ? static_cast<std::size_t>(std::max(o.directions, 0)) : o.density.size();
    if (m < 32 || m % 2) s.err(o.density.empty() ? "directions" : "density", "M must be even and >= 32");
  } else if (o.kind == "plane") {
    if (!o.density.empty() || !o.modes.empty()) s.err("density", "plane waves take no density");
  } else {
    s.err("kind", "expected plane or herglotz");
  }
  return o;
}

forward::MeshOptions read_mesh(Sec& s) {
  forward::MeshOptions o;
  o.order = s.integer("order", o.order);
  s.require(o.order >= 2 && o.order <= 64, "order", "must be in [2, 64]");
  o.nodes_per_wavelength = s.num("nodes_per_wavelength", o.nodes_per_wavelength);
  s.require(o.nodes_per_wavelength > 0, "nodes_per_wavelength", "must be > 0");
  o.min_panels = s.integer("min_panels", o.min_panels);
  s.require(o.min_panels >= 1, "min_panels", "must be >= 1");
  o.grading_exponent = s.num("grading_exponent", o.grading_exponent);
  s.require(o.grading_exponent >= 1, "grading_exponent", "must be >= 1");
  o.refinement = s.integer("refinement", o.refinement);
  s.require(o.refinement >= 0 && o.refinement <= 6, "refinement", "must be in [0, 6]");
  return o;
}

BoundsSpec read_bounds(Sec& s) {
  BoundsSpec o;
  o.angle_min = s.num("angle_min", o.angle_min);
  o.angle_max = s.num("angle_max", o.angle_max);
  s.require(o.angle_min >= 0 && o.angle_min < o.angle_max && o.angle_max <= kPi, "angle_max",
            "need 0 <= angle_min < angle_max <= pi");
  o.min_edge = s.num("min_edge", o.min_edge);
  s.require(o.min_edge >= 0, "min_edge", "must be >= 0");
  o.radius = s.num("radius", o.radius);
  s.require(o.radius > 0, "radius", "must be > 0");
  o.gamma_min = s.num("gamma_min", o.gamma_min);
  o.gamma_max = s.num("gamma_max", o.gamma_max);
  s.require(o.gamma_min >= 0 && o.gamma_min < o.gamma_max, "gamma_max", "need 0 <= gamma_min < gamma_max");
  o.q_max = s.num("q_max", o.q_max);
  s.require(o.q_max > 0, "q_max", "must be > 0");
  return o;
}

ContourSpec read_contours(Sec& parent, const std::string& key, ContourSpec def) {
  Sec s(parent.raw(key), parent.sub_path(key), parent.ctx());
  ContourSpec o = def;
  o.order = s.integer("order", o.order);
  s.require(o.order >= 2 && o.order <= 64, "order", "must be in [2, 64]");
  o.panels = s.integer("panels", o.panels);
  s.require(o.panels >= 1, "panels", "must be >= 1");
  o.grading = s.integer("grading", o.grading);
  s.require(o.grading >= 1, "grading", "must be >= 1");
  s.done();
  return o;
}

template <class F>
auto section(Sec& top, const std::string& key, F&& f) {
  Sec s(top.raw(key), key, top.ctx());
  auto r = f(s);
  s.done();
  return r;
}

std::string error_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool needs_scatterer(const std::string& k) {
  return k != "eta" && k != "profile" && k != "disk-eig";
}

}  // namespace

// ---- builders -----------------------------------------------------------------

forward::Scatterer ScattererSpec::build() const {
  if (shape == "circle") return forward::Scatterer(forward::Circle{center, radius}, gamma, q);
  return forward::Scatterer(geometry::Polygon(vertices), gamma, q);
}

forward::IncidentField IncidentSpec::build() const { return build(angle); }

forward::IncidentField IncidentSpec::build(double a) const {
  if (kind == "plane") return forward::IncidentField::plane_wave(k, a, amplitude);
  std::vector<cplx> g = density;
  if (g.empty()) {
    const auto h = herglotz::HerglotzDensity::trigonometric(directions, modes);
    g = h.values();
  }
  for (auto& x : g) x *= amplitude;
  return forward::IncidentField::herglotz(k, g);
}

forward::ScattererBounds BoundsSpec::build() const {
  forward::ScattererBounds b;
  b.polygon = {angle_min, angle_max, min_edge, radius};
  b.gamma_min = gamma_min;
  b.gamma_max = gamma_max;
  b.q_max = q_max;
  return b;
}

experiments::PerturbationFamily PerturbationSpec::build() const {
  experiments::PerturbationFamily f;
  f.kind = experiments::PerturbationFamily::parse_kind(family);
  f.direction = direction;
  f.vertex = static_cast<std::size_t>(vertex);
  f.steps = steps;
  return f;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const auto mesh_eq = [](const forward::MeshOptions& a, const forward::MeshOptions& b) {
    return a.order == b.order && a.nodes_per_wavelength == b.nodes_per_wavelength &&
           a.min_panels == b.min_panels && a.grading_exponent == b.grading_exponent &&
           a.refinement == b.refinement;
  };
  return kind == o.kind && scatterers == o.scatterers && incident == o.incident && mesh_eq(mesh, o.mesh) &&
         bounds == o.bounds && farfield_samples == o.farfield_samples && output == o.output &&
         corner == o.corner && identity == o.identity && perturbation == o.perturbation &&
         sweep == o.sweep && blowup == o.blowup && disk_eig == o.disk_eig;
}

ConfigErrors::ConfigErrors(std::vector<std::string> v) : ConfigError(join(v)), v_(std::move(v)) {}

// ---- parse ------------------------------------------------------------------

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto p = what.find(": syntax error"); p != std::string::npos) what = what.substr(p + 2);
    throw ConfigErrors({"syntax error at " + error_position(text, e.byte) + ": " + what});
  }
  if (!j.is_object()) throw ConfigErrors({"config: top level must be an object"});

  Ctx c{{}, base_dir};
  Sec top(&j, "", c);
  ExperimentConfig cfg;
  cfg.kind = top.str("kind", "");
  if (!cfg.kind.empty() && std::find(kKinds.begin(), kKinds.end(), cfg.kind) == kKinds.end())
    top.err("kind", "unknown experiment kind '" + cfg.kind + "'");
  cfg.output = top.str("output", cfg.output);
  cfg.farfield_samples = top.integer("farfield_samples", cfg.farfield_samples);
  top.require(cfg.farfield_samples >= 8, "farfield_samples", "must be >= 8");

  cfg.incident = section(top, "incident", read_incident);
  cfg.mesh = section(top, "mesh", read_mesh);
  cfg.bounds = section(top, "bounds", read_bounds);

  if (const json* sc = top.raw("scatterers")) {
    if (!sc->is_array()) {
      top.err("scatterers", "expected an array");
    } else {
      for (std::size_t i = 0; i < sc->size(); ++i) {
        const std::string p = "scatterers[" + std::to_string(i) + "]";
        const std::size_t before = c.errs.size();
        auto s = read_scatterer((*sc)[i], p, c);
        if (c.errs.size() == before) check_admissible(s, cfg.bounds, p, c);
        cfg.scatterers.push_back(std::move(s));
      }
    }
  }

  cfg.corner = section(top, "corner", [](Sec& s) {
    CornerSpec o;
    o.gamma = s.num("gamma", o.gamma);
    o.opening = s.num("opening", o.opening);
    o.samples = s.integer("samples", o.samples);
    o.use_scatterer = s.flag("use_scatterer", o.use_scatterer);
    s.require(o.gamma > 0, "gamma", "must be > 0");
    s.require(o.gamma != 1, "gamma", "gamma != 1 violated (no contrast in sigma)");
    s.require(o.opening > 0 && o.opening < kPi, "opening", "must lie in (0, pi)");
    s.require(o.samples >= 2, "samples", "must be >= 2");
    return o;
  });

  cfg.identity = section(top, "identity", [](Sec& s) {
    IdentitySpec o;
    o.vertex = s.integer("vertex", o.vertex);
    s.require(o.vertex >= 0, "vertex", "must be >= 0");
    o.h = s.num("h", o.h);
    s.require(o.h > 0, "h", "must be > 0");
    o.tau_factor = s.num("tau_factor", o.tau_factor);
    s.require(o.tau_factor >= 1, "tau_factor", "must be >= 1 (tau >= tau0)");
    o.contours = read_contours(s, "contours", o.contours);
    o.refined = read_contours(s, "refined", o.refined);
    o.fit_r_lo = s.num("fit_r_lo", o.fit_r_lo);
    o.fit_r_hi = s.num("fit_r_hi", o.fit_r_hi);
    s.require(o.fit_r_lo >= 0 && o.fit_r_hi >= 0, "fit_r_hi", "must be >= 0");
    if (o.fit_r_lo > 0 && o.fit_r_hi > 0) s.require(o.fit_r_lo < o.fit_r_hi, "fit_r_lo", "must be below fit_r_hi");
    return o;
  });

  cfg.perturbation = section(top, "perturbation", [](Sec& s) {
    PerturbationSpec o;
    o.family = s.str("family", o.family);
    if (o.family != "translation" && o.family != "vertex_pull" && o.family != "dilation")
      s.err("family", "expected translation, vertex_pull or dilation");
    o.direction = read_vec2(s, "direction", o.direction);
    s.require(o.direction.norm() > 0, "direction", "must be nonzero");
    o.vertex = s.integer("vertex", o.vertex);
    s.require(o.vertex >= 0, "vertex", "must be >= 0");
    o.steps = s.numbers("steps", o.steps);
    s.require(!o.steps.empty(), "steps", "must not be empty");
    s.require(std::is_sorted(o.steps.begin(), o.steps.end()), "steps", "must be ordered");
    return o;
  });

  cfg.sweep = section(top, "sweep", [](Sec& s) {
    SweepSpec o;
    o.radius = s.num("radius", o.radius);
    s.require(o.radius >= 0, "radius", "must be >= 0");
    o.incidences = s.numbers("incidences", o.incidences);
    s.require(!o.incidences.empty(), "incidences", "must not be empty");
    o.k_threshold = s.num("k_threshold", o.k_threshold);
    s.require(o.k_threshold >= 0, "k_threshold", "must be >= 0");
    o.annulus_radius = s.num("annulus_radius", o.annulus_radius);
    o.annulus_nodes = s.integer("annulus_nodes", o.annulus_nodes);
    o.hull_distance = s.num("hull_distance", o.hull_distance);
    o.hull_nodes = s.integer("hull_nodes", o.hull_nodes);
    s.require(o.annulus_radius >= 0, "annulus_radius", "must be >= 0");
    s.require(o.annulus_nodes >= 1 && o.hull_nodes >= 1, "hull_nodes", "node counts must be >= 1");
    s.require(o.hull_distance > 0, "hull_distance", "must be > 0");
    return o;
  });

  cfg.blowup = section(top, "blowup", [](Sec& s) {
    BlowupConfig o;
    o.vertex = s.integer("vertex", o.vertex);
    s.require(o.vertex >= 0, "vertex", "must be >= 0");
    o.grid_spacing = s.num("grid_spacing", o.grid_spacing);
    s.require(o.grid_spacing > 0, "grid_spacing", "must be > 0");
    o.directions = s.integer("directions", o.directions);
    s.require(o.directions >= 32 && o.directions % 2 == 0, "directions", "M must be even and >= 32");
    o.lambdas = s.numbers("lambdas", o.lambdas);
    for (double l : o.lambdas) s.require(l > 0, "lambdas", "must be > 0");
    o.smooth_modes = read_modes(s, "smooth_modes", o.smooth_modes);
    return o;
  });

  cfg.disk_eig = section(top, "disk_eig", [](Sec& s) {
    DiskEigSpec o;
    o.radius = s.num("radius", o.radius);
    o.gamma = s.num("gamma", o.gamma);
    o.q = s.num("q", o.q);
    o.k_lo = s.num("k_lo", o.k_lo);
    o.k_hi = s.num("k_hi", o.k_hi);
    o.n_lo = s.integer("n_lo", o.n_lo);
    o.n_hi = s.integer("n_hi", o.n_hi);
    o.samples = s.integer("samples", o.samples);
    s.require(o.radius > 0 && o.gamma > 0 && o.q > 0, "radius", "radius, gamma, q must be > 0");
    s.require(o.k_lo > 0 && o.k_lo < o.k_hi, "k_hi", "need 0 < k_lo < k_hi");
    s.require(o.n_lo <= o.n_hi, "n_hi", "need n_lo <= n_hi");
    s.require(o.samples >= 10, "samples", "must be >= 10");
    return o;
  });

  top.done();
  if (!cfg.kind.empty() && c.errs.empty()) {
    auto v = kind_violations(cfg, cfg.kind);
    c.errs.insert(c.errs.end(), v.begin(), v.end());
  }
  if (!c.errs.empty()) throw ConfigErrors(std::move(c.errs));
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const std::exception& e) {
    throw ConfigErrors({e.what()});
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config_text(text, dir.empty() ? "." : dir.string());
}

std::vector<std::string> kind_violations(const ExperimentConfig& c, const std::string& kind) {
  std::vector<std::string> v;
  if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end()) {
    v.push_back("kind: unknown experiment kind '" + kind + "'");
    return v;
  }
  if (!c.kind.empty() && c.kind != kind)
    v.push_back("kind: config says '" + c.kind + "' but '" + kind + "' was requested");
  const auto polygons = [&](std::size_t n) {
    for (std::size_t i = 0; i < std::min(n, c.scatterers.size()); ++i)
      if (c.scatterers[i].shape != "polygon")
        v.push_back("scatterers[" + std::to_string(i) + "]: " + kind + " needs a polygon");
  };
  if (needs_scatterer(kind) && c.scatterers.empty()) v.push_back("scatterers: " + kind + " needs a scatterer");
  if (kind == "eta" && c.corner.use_scatterer) {
    if (c.scatterers.empty()) v.push_back("scatterers: corner.use_scatterer needs a scatterer");
    polygons(1);
  }
  if (kind != "solve" && kind != "farfield")
    for (std::size_t i = 0; i < c.scatterers.size(); ++i)
      if (c.scatterers[i].vacuum)
        v.push_back("scatterers[" + std::to_string(i) + "]: gamma != 1 violated (vacuum allowed only for solve/farfield)");
  if (kind == "identity") {
    if (c.scatterers.size() != 2) v.push_back("scatterers: identity needs exactly two scatterers (D, D')");
    polygons(2);
    if (c.scatterers.size() == 2 && (c.scatterers[0].gamma != c.scatterers[1].gamma ||
                                     c.scatterers[0].q != c.scatterers[1].q))
      v.push_back("scatterers: identity needs equal gamma and q for D and D'");
    if (!c.scatterers.empty() && c.identity.vertex >= static_cast<int>(c.scatterers[0].vertices.size()))
      v.push_back("identity.vertex: out of range");
  }
  if (kind == "stability" || kind == "smallness") {
    if (c.scatterers.size() != 1) v.push_back("scatterers: " + kind + " takes one base scatterer");
    polygons(1);
    if (c.perturbation.family == "vertex_pull" && !c.scatterers.empty() &&
        c.perturbation.vertex >= static_cast<int>(c.scatterers[0].vertices.size()))
      v.push_back("perturbation.vertex: out of range");
  }
  if (kind == "corner-bound") polygons(c.scatterers.size());
  if (kind == "herglotz-blowup") {
    polygons(1);
    if (!c.scatterers.empty() && c.blowup.vertex >= static_cast<int>(c.scatterers[0].vertices.size()))
      v.push_back("blowup.vertex: out of range");
  }
  if (kind == "corner-bound" && c.incident.kind != "plane")
    v.push_back("incident: corner-bound sweeps plane-wave incidences");
  return v;
}

// ---- serialize ----------------------------------------------------------------

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["kind"] = c.kind;
  j["output"] = c.output;
  j["farfield_samples"] = c.farfield_samples;

  json sc = json::array();
  for (const auto& s : c.scatterers) {
    json o;
    o["shape"] = s.shape;
    o["gamma"] = s.gamma;
    o["q"] = s.q;
    o["vacuum"] = s.vacuum;
    if (s.shape == "circle") {
      o["center"] = vec_json(s.center);
      o["radius"] = s.radius;
    } else {
      json v = json::array();
      for (const auto& p : s.vertices) v.push_back(vec_json(p));
      o["vertices"] = v;
    }
    sc.push_back(o);
  }
  j["scatterers"] = sc;

  const auto& in = c.incident;
  json inc{{"kind", in.kind}, {"k", in.k}, {"angle", in.angle}, {"amplitude", cplx_json(in.amplitude)},
           {"directions", in.directions}};
  if (!in.density.empty()) {
    json d = json::array();
    for (const auto& z : in.density) d.push_back(cplx_json(z));
    inc["density"] = d;
  }
  if (!in.modes.empty()) inc["modes"] = modes_json(in.modes);
  j["incident"] = inc;

  j["mesh"] = {{"order", c.mesh.order},
               {"nodes_per_wavelength", c.mesh.nodes_per_wavelength},
               {"min_panels", c.mesh.min_panels},
               {"grading_exponent", c.mesh.grading_exponent},
               {"refinement", c.mesh.refinement}};
  const auto& b = c.bounds;
  j["bounds"] = {{"angle_min", b.angle_min}, {"angle_max", b.angle_max}, {"min_edge", b.min_edge},
                 {"radius", b.radius},       {"gamma_min", b.gamma_min}, {"gamma_max", b.gamma_max},
                 {"q_max", b.q_max}};
  j["corner"] = {{"gamma", c.corner.gamma},
                 {"opening", c.corner.opening},
                 {"samples", c.corner.samples},
                 {"use_scatterer", c.corner.use_scatterer}};
  const auto contour = [](const ContourSpec& s) {
    return json{{"order", s.order}, {"panels", s.panels}, {"grading", s.grading}};
  };
  const auto& id = c.identity;
  j["identity"] = {{"vertex", id.vertex},         {"h", id.h},
                   {"tau_factor", id.tau_factor}, {"contours", contour(id.contours)},
                   {"refined", contour(id.refined)}, {"fit_r_lo", id.fit_r_lo},
                   {"fit_r_hi", id.fit_r_hi}};
  const auto& p = c.perturbation;
  j["perturbation"] = {{"family", p.family}, {"direction", vec_json(p.direction)}, {"vertex", p.vertex},
                       {"steps", p.steps}};
  const auto& w = c.sweep;
  j["sweep"] = {{"radius", w.radius},
                {"incidences", w.incidences},
                {"k_threshold", w.k_threshold},
                {"annulus_radius", w.annulus_radius},
                {"annulus_nodes", w.annulus_nodes},
                {"hull_distance", w.hull_distance},
                {"hull_nodes", w.hull_nodes}};
  const auto& bl = c.blowup;
  j["blowup"] = {{"vertex", bl.vertex},
                 {"grid_spacing", bl.grid_spacing},
                 {"directions", bl.directions},
                 {"lambdas", bl.lambdas},
                 {"smooth_modes", modes_json(bl.smooth_modes)}};
  const auto& de = c.disk_eig;
  j["disk_eig"] = {{"radius", de.radius}, {"gamma", de.gamma}, {"q", de.q},         {"k_lo", de.k_lo},
                   {"k_hi", de.k_hi},     {"n_lo", de.n_lo},   {"n_hi", de.n_hi}, {"samples", de.samples}};
  return j.dump(2) + "\n";
}

}  // namespace scatterlab::config
