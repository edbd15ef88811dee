#include "scatterlab/app.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "scatterlab/corner.hpp"
#include "scatterlab/experiments.hpp"
#include "scatterlab/herglotz.hpp"
#include "scatterlab/io.hpp"

namespace scatterlab::app {

using json = nlohmann::json;
using config::ExperimentConfig;

namespace {

const char* kSDefinition =
    "S = computed H2(B_2R) norm of the incident field (polar Gauss quadrature of |u|^2 + |grad u|^2 + "
    "|Hessian|^2), R = sweep.radius or 1.05 * max scatterer radius";

std::string line(const char* f, double a) {
  char b[256];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

json floor_json(const experiments::SolverFloor& f) {
  return {{"disk_error", f.disk_error}, {"cauchy", f.cauchy}, {"value", f.value}};
}

json diag_json(const forward::SolverDiagnostics& d) {
  return {{"unknowns", d.unknowns},
          {"condition_estimate", d.condition_estimate},
          {"residual", d.residual},
          {"wall_seconds", d.wall_seconds}};
}

json mesh_json(const forward::MeshOptions& m) {
  return {{"order", m.order},
          {"nodes_per_wavelength", m.nodes_per_wavelength},
          {"min_panels", m.min_panels},
          {"grading_exponent", m.grading_exponent},
          {"refinement", m.refinement}};
}

struct Ctx {
  const ExperimentConfig& cfg;
  std::string dir;
  int threads;
  json& m;  // manifest under construction
  std::vector<std::string>& files;
  std::string summary;

  void write(const std::string& name, const std::string& content) {
    const std::string p = (std::filesystem::path(dir) / name).string();
    io::atomic_write(p, content);
    files.push_back(p);
  }
  std::string path(const std::string& name) const { return (std::filesystem::path(dir) / name).string(); }
  void say(const std::string& s) { summary += s + "\n"; }

  forward::SolveOptions solve() const { return {threads, 1e-14}; }
  experiments::SweepOptions sweep() const {
    experiments::SweepOptions o;
    o.mesh = cfg.mesh;
    o.solve = solve();
    o.farfield_samples = cfg.farfield_samples;
    o.radius = cfg.sweep.radius;
    o.bounds = cfg.bounds.build();
    o.threads = threads;
    return o;
  }
  double s_radius(double rmax) const { return cfg.sweep.radius > 0 ? cfg.sweep.radius : 1.05 * rmax; }
};

std::string table_csv(const experiments::SweepTable& t) { return t.csv(); }

json failures_json(const experiments::SweepTable& t) {
  json a = json::array();
  for (const auto& r : t.records)
    if (r.failed) a.push_back({{"id", r.id}, {"error", r.error}});
  return a;
}

// ---- kinds --------------------------------------------------------------------

void run_solve(Ctx& c, bool traces) {
  const auto sc = c.cfg.scatterers.front().build();
  const auto inc = c.cfg.incident.build();
  const auto sol = forward::solve_scattering(sc, inc, c.cfg.mesh, c.solve());
  const auto ff = forward::far_field(sol, c.cfg.farfield_samples);
  if (traces) {
    const auto& mesh = *sol.mesh;
    std::string s = "x,y,nx,ny,weight,u_re,u_im,dn_re,dn_im\n";
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
      const Vec2 p = mesh.points()[i], n = mesh.normals()[i];
      s += io::csv_row({p.x, p.y, n.x, n.y, mesh.weights()[i], sol.trace_u[i].real(), sol.trace_u[i].imag(),
                        sol.trace_dn[i].real(), sol.trace_dn[i].imag()});
    }
    c.write("traces.csv", s);
  }
  forward::write_farfield_csv(c.path("farfield.csv"), ff);
  c.files.push_back(c.path("farfield.csv"));

  const double S = inc.amplitude_s(c.s_radius(forward::shape_radius(sc.shape())));
  const auto floor = experiments::calibrate_floor(sc, inc, c.cfg.mesh, c.solve(), c.cfg.farfield_samples);
  c.m["floors"] = floor_json(floor);
  c.m["diagnostics"] = diag_json(sol.diagnostics);
  c.m["results"] = {{"farfield_norm", ff.l2_norm()}, {"S", S}, {"nodes", sol.mesh->node_count()}};
  c.say(line("||u_inf||_L2 = %.10e", ff.l2_norm()));
  c.say(line("S = %.10e", S));
  c.say(line("solver floor = %.3e", floor.value));
}

void run_eta(Ctx& c) {
  std::string s = "vertex,opening,gamma,eta,residual\n";
  json rows = json::array();
  auto one = [&](int v, double g, double a) {
    const long double ext = corner::singularity_exponent_ext(g, a);
    const double eta = static_cast<double>(ext);
    const double r = corner::exponent_residual(g, a, ext);
    s += io::csv_row({double(v), a, g, eta, r});
    rows.push_back({{"vertex", v}, {"opening", a}, {"gamma", g}, {"eta", eta}, {"residual", r}});
    char b[256];
    std::snprintf(b, sizeof b, "vertex %d  a = %.10f  gamma = %g  eta = %.10f  residual = %.3e", v, a, g, eta, r);
    c.say(b);
  };
  if (c.cfg.corner.use_scatterer) {
    const auto& sp = c.cfg.scatterers.front();
    const geometry::Polygon p(sp.vertices);
    for (std::size_t i = 0; i < p.size(); ++i) one(int(i), sp.gamma, p.interior_angle(i));
  } else {
    one(0, c.cfg.corner.gamma, c.cfg.corner.opening);
  }
  c.write("eta.csv", s);
  c.m["results"] = rows;
}

void run_profile(Ctx& c) {
  const double g = c.cfg.corner.gamma, a = c.cfg.corner.opening;
  const auto modes = corner::transmission_exponents(g, a, 1.0);
  if (modes.empty()) throw SolverError("no transmission exponent in (0, 1)");
  const auto pr = corner::angular_profile(g, a, modes.front().lambda, modes.front().parity);
  std::string s = "theta,phi,dphi,interior\n";
  const int n = c.cfg.corner.samples;
  for (int i = 0; i < n; ++i) {
    const double t = -kPi + 2 * kPi * i / n;
    s += io::csv_row({t, pr.value(t), pr.derivative(t), pr.interior(t) ? 1.0 : 0.0});
  }
  c.write("profile.csv", s);
  const char* par = pr.parity == corner::Parity::symmetric ? "symmetric" : "antisymmetric";
  c.m["results"] = {{"eta", pr.lambda},
                    {"parity", par},
                    {"exterior_amplitude", pr.exterior_amplitude},
                    {"continuity_residual", pr.continuity_residual()},
                    {"flux_residual", pr.flux_residual()}};
  c.say(line("eta = %.10f", pr.lambda) + std::string(" (") + par + ")");
  c.say(line("exterior amplitude B = %.10e", pr.exterior_amplitude));
  c.say(line("continuity residual = %.3e", pr.continuity_residual()));
  c.say(line("flux residual = %.3e", pr.flux_residual()));
}

void run_identity(Ctx& c) {
  const auto& idc = c.cfg.identity;
  const auto s1 = c.cfg.scatterers[0].build(), s2 = c.cfg.scatterers[1].build();
  const auto& D = *s1.polygon();
  const auto& D2 = *s2.polygon();
  const bool same = D.vertices() == D2.vertices();
  std::vector<Vec2> all = D.vertices();
  all.insert(all.end(), D2.vertices().begin(), D2.vertices().end());
  const auto hull = geometry::convex_hull(all);
  const Vec2 xc = D.vertex(idc.vertex);
  const auto fr = geometry::corner_frame(hull, D, xc);
  const double tau = idc.tau_factor * geometry::contour_tau0(idc.h, fr.hull_opening);
  const auto cs =
      geometry::build_contours(fr, D, hull, idc.h, tau, idc.contours.build(), same ? nullptr : &D2);

  const auto inc = c.cfg.incident.build();
  const auto sol = forward::solve_scattering(s1, inc, c.cfg.mesh, c.solve());
  forward::MeshOptions m2 = c.cfg.mesh;
  if (same) m2.refinement += 1;  // a distinct discretisation of the same medium
  const auto sol2 = forward::solve_scattering(s2, inc, m2, c.solve());

  auto sd = corner::make_singularity_data(fr, s1.gamma());
  corner::FitWindow w;
  w.r_lo = idc.fit_r_lo > 0 ? idc.fit_r_lo : idc.h / 30;
  w.r_hi = idc.fit_r_hi > 0 ? idc.fit_r_hi : idc.h / 2;
  const auto kf = corner::extract_singularity_coefficient(sol, sd, w);
  sd.K = kf.K;
  sd.fit_residual = kf.residual;
  sd.low_confidence = kf.low_confidence;

  corner::IdentityOptions io;
  io.refined = idc.refined.build();
  io.threads = c.threads;
  const auto rep = corner::verify_integral_identity(sol, sol2, cs, corner::CGOParams{fr, tau}, sd, io);
  c.write("identity.json", rep.to_json() + "\n");
  c.m["results"] = json::parse(rep.to_json());
  c.m["results"]["K_fit_residual"] = kf.residual;
  c.m["results"]["K_low_confidence"] = kf.low_confidence;
  c.m["floors"] = {{"solver_error", rep.solver_error}, {"quadrature_error", rep.quadrature_error}};
  c.m["diagnostics"] = {{"D", diag_json(sol.diagnostics)}, {"D_prime", diag_json(sol2.diagnostics)}};
  c.say(line("residual = %.6e", rep.residual));
  c.say(line("budget   = %.6e", rep.budget));
  c.say(line("|lhs|    = %.6e", std::abs(rep.lhs)));
  c.say(line("eta = %.10f", rep.eta) + line("  |K| = %.6e", std::abs(rep.K)));
  c.say(std::string("within budget: ") + (rep.residual <= rep.budget ? "yes" : "no"));
}

void run_stability(Ctx& c) {
  const auto base = c.cfg.scatterers.front().build();
  const auto r = experiments::run_stability_sweep(base, c.cfg.perturbation.build(), c.cfg.incident.build(),
                                                  c.sweep());
  c.write("stability.csv", table_csv(r.table));
  c.m["floors"] = floor_json(r.floor);
  c.m["results"] = {{"S", r.s},
                    {"eta_m", r.eta_m},
                    {"spearman", r.spearman},
                    {"beta", r.beta},
                    {"fit", {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"points", r.fit.points}}},
                    {"uniqueness_ok", r.uniqueness_ok},
                    {"failures", r.failures},
                    {"failed_records", failures_json(r.table)}};
  c.say(line("spearman(d_H, eps) = %.6f", r.spearman));
  c.say(line("beta = %.6f", r.beta));
  c.say(line("failures = %.0f", double(r.failures)));
}

void run_corner_bound(Ctx& c) {
  std::vector<forward::Scatterer> sc;
  for (const auto& s : c.cfg.scatterers) sc.push_back(s.build());
  const auto r = experiments::run_corner_bound_sweep(sc, c.cfg.sweep.incidences, c.cfg.incident.k, c.sweep(),
                                                     c.cfg.sweep.k_threshold);
  c.write("corner_bound.csv", table_csv(r.table));
  c.m["floors"] = floor_json(r.floor);
  c.m["results"] = {{"min_norm", r.min_norm},
                    {"min_ratio", r.min_ratio},
                    {"counted", r.counted},
                    {"k_threshold", c.cfg.sweep.k_threshold},
                    {"failures", r.failures},
                    {"failed_records", failures_json(r.table)}};
  c.say(line("min ||u_inf|| = %.6e", r.min_norm));
  c.say(line("min ||u_inf||/S = %.6e", r.min_ratio));
  c.say(line("records counted = %.0f", double(r.counted)));
  c.say(line("solver floor = %.3e", r.floor.value));
}

void run_smallness(Ctx& c) {
  experiments::SmallnessOptions o;
  o.sweep = c.sweep();
  o.annulus_radius = c.cfg.sweep.annulus_radius;
  o.annulus_nodes = c.cfg.sweep.annulus_nodes;
  o.hull_distance = c.cfg.sweep.hull_distance;
  o.hull_nodes = c.cfg.sweep.hull_nodes;
  const auto r = experiments::run_smallness_probe(c.cfg.scatterers.front().build(), c.cfg.perturbation.build(),
                                                  c.cfg.incident.build(), o);
  c.write("smallness.csv", table_csv(r.table));
  c.m["results"] = {{"spearman", r.spearman}, {"failures", r.failures}, {"failed_records", failures_json(r.table)}};
  c.say(line("spearman(eps, sup_annulus) = %.6f", r.spearman));
}

void run_blowup(Ctx& c) {
  experiments::BlowupSpec b;
  const auto& sp = c.cfg.scatterers.front();
  b.domain = geometry::Polygon(sp.vertices);
  b.vertex = c.cfg.blowup.vertex;
  b.gamma = sp.gamma;
  b.k = c.cfg.incident.k;
  b.grid_spacing = c.cfg.blowup.grid_spacing;
  b.smooth_modes = c.cfg.blowup.smooth_modes;
  b.directions = c.cfg.blowup.directions;
  b.lambdas = c.cfg.blowup.lambdas;
  const auto r = experiments::run_herglotz_blowup(b);
  herglotz::write_blowup_csv(c.path("blowup_regular.csv"), r.regular);
  c.files.push_back(c.path("blowup_regular.csv"));
  herglotz::write_blowup_csv(c.path("blowup_singular.csv"), r.singular);
  c.files.push_back(c.path("blowup_singular.csv"));
  c.m["results"] = {{"eta", r.eta},
                    {"smooth_norm", r.smooth_norm},
                    {"matched_regular", r.matched_regular},
                    {"singular_dominates", r.singular_dominates},
                    {"regular_bounded", r.regular_bounded},
                    {"singular_monotone", r.singular_monotone}};
  c.say(line("eta = %.10f", r.eta));
  c.say(std::string("singular dominates at matched eps: ") + (r.singular_dominates ? "yes" : "no"));
  c.say(std::string("regular bounded by 2||g||: ") + (r.regular_bounded ? "yes" : "no"));
  c.say(std::string("singular non-decreasing: ") + (r.singular_monotone ? "yes" : "no"));
}

void run_disk_eig(Ctx& c) {
  const auto& d = c.cfg.disk_eig;
  const auto ev =
      herglotz::disk_transmission_eigenvalues(d.radius, d.gamma, d.q, d.k_lo, d.k_hi, d.n_lo, d.n_hi, d.samples);
  std::string s = "mode,k,determinant,local_scale\n";
  for (const auto& e : ev) s += io::csv_row({double(e.mode), e.k, e.determinant, e.local_scale});
  c.write("disk_eigenvalues.csv", s);
  c.m["results"] = {{"count", ev.size()}};
  c.say(line("eigenvalues found = %.0f", double(ev.size())));
  for (const auto& e : ev) {
    char b[128];
    std::snprintf(b, sizeof b, "  n = %d  k = %.10f", e.mode, e.k);
    c.say(b);
  }
}

}  // namespace

RunResult run(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  const std::string kind = opts.kind.empty() ? cfg.kind : opts.kind;
  if (kind.empty()) throw config::ConfigErrors({"kind: no experiment kind given"});
  if (auto v = config::kind_violations(cfg, kind); !v.empty()) throw config::ConfigErrors(std::move(v));
  if (opts.threads < 1) throw config::ConfigErrors({"threads: must be >= 1"});
  cfg.kind = kind;
  const std::string dir = opts.out_dir.empty() ? cfg.output : opts.out_dir;

  const std::string canon = config::serialize_config(cfg);
  json m;
  m["tool"] = "scatterlab";
  m["version"] = kVersion;
  m["kind"] = kind;
  m["config_hash"] = io::fnv1a_hex(canon);
  m["config"] = json::parse(canon);
  m["threads"] = opts.threads;
  m["mesh"] = mesh_json(cfg.mesh);
  m["s_definition"] = kSDefinition;
  m["floors"] = json::object();

  RunResult res;
  res.kind = kind;
  Ctx c{cfg, dir, opts.threads, m, res.files, {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const std::string manifest = (std::filesystem::path(dir) / "manifest.json").string();
  try {
    if (kind == "solve") run_solve(c, true);
    else if (kind == "farfield") run_solve(c, false);
    else if (kind == "eta") run_eta(c);
    else if (kind == "profile") run_profile(c);
    else if (kind == "identity") run_identity(c);
    else if (kind == "stability") run_stability(c);
    else if (kind == "corner-bound") run_corner_bound(c);
    else if (kind == "smallness") run_smallness(c);
    else if (kind == "herglotz-blowup") run_blowup(c);
    else if (kind == "disk-eig") run_disk_eig(c);
  } catch (const std::exception& e) {
    m["status"] = "failed";
    m["error"] = e.what();
    m["partial_outputs"] = res.files;
    m["wall_seconds"] = wall();
    try {
      io::atomic_write(manifest, m.dump(2) + "\n");
    } catch (...) {
    }
    throw;
  }
  m["status"] = "ok";
  m["outputs"] = res.files;
  m["wall_seconds"] = wall();
  res.manifest_json = m.dump(2) + "\n";
  io::atomic_write(manifest, res.manifest_json);
  res.files.push_back(manifest);
  res.summary = c.summary;
  return res;
}

}  // namespace scatterlab::app
