#include "scatterlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "scatterlab/io.hpp"

namespace scatterlab::experiments {

using forward::FieldSolution;
using forward::far_field;
using forward::farfield_l2_distance;
using forward::solve_scattering;

double delta_axis(double s, double eps, double power) {
  if (!(eps > 0) || !(s / eps > std::exp(1.0))) return kNoDelta;
  return std::pow(std::log(std::log(s / eps)), -power);
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) r[idx[m]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = a.size();
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("spearman: size mismatch");
  if (x.size() < 2) return 0.0;
  return pearson(ranks(x), ranks(y));
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("least_squares: size mismatch");
  LinearFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  const double n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) return f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

// ---- tables ---------------------------------------------------------------

double SweepTable::at(std::size_t row, const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractViolation("sweep table: no column " + name);
  return records.at(row).values.at(it - columns.begin());
}

std::vector<double> SweepTable::column(const std::string& name, bool skip_failed) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractViolation("sweep table: no column " + name);
  std::vector<double> v;
  for (const auto& r : records)
    if (!(skip_failed && r.failed)) v.push_back(r.values.at(it - columns.begin()));
  return v;
}

std::string SweepTable::csv() const {
  std::string s = "id";
  for (const auto& c : columns) s += "," + c;
  s += ",failed\n";
  for (const auto& r : records) {
    std::vector<double> v = r.values;
    v.resize(columns.size(), 0.0);
    v.push_back(r.failed ? 1.0 : 0.0);
    s += r.id + "," + io::csv_row(v);
  }
  return s;
}

// ---- floors -----------------------------------------------------------------

SolverFloor calibrate_floor(const Scatterer& base, const IncidentField& inc, const MeshOptions& mesh,
                            const SolveOptions& solve, std::size_t n) {
  SolverFloor f;
  if (base.is_vacuum()) return f;
  const double k = inc.wavenumber();
  double rad = forward::shape_radius(base.shape());
  if (const auto* p = base.polygon()) rad = std::sqrt(p->area() / kPi);
  const forward::Scatterer disk(forward::Circle{{0, 0}, rad}, base.gamma(), base.q());
  const auto pw = IncidentField::plane_wave(k, 0.0);
  const auto sd = solve_scattering(disk, pw, mesh, solve);
  const forward::DiskSeries series(rad, base.gamma(), base.q(), k, 0.0);
  f.disk_error = farfield_l2_distance(far_field(sd, n), series.far_field_pattern(n));

  MeshOptions fine = mesh;
  fine.refinement += 1;
  const auto a = solve_scattering(base, inc, mesh, solve);
  const auto b = solve_scattering(base, inc, fine, solve);
  f.cauchy = farfield_l2_distance(far_field(a, n), far_field(b, n));
  f.value = std::max(f.disk_error, f.cauchy);
  return f;
}

// ---- corner coefficients ------------------------------------------------------

std::vector<CornerCoefficient> corner_coefficients(const FieldSolution& sol, double frac) {
  std::vector<CornerCoefficient> out;
  const auto* d = sol.scatterer.polygon();
  if (!d || sol.scatterer.gamma() == 1.0) return out;
  const auto hull = geometry::convex_hull(d->vertices());
  const std::size_t n = d->size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = d->interior_angle(i);
    if (!(a < kPi)) continue;
    if (!hull.find_vertex(d->vertex(i))) continue;
    double r = std::min(d->edge_length(i), d->edge_length((i + n - 1) % n));
    for (std::size_t e = 0; e < n; ++e) {
      if (e == i || (e + 1) % n == i) continue;
      r = std::min(r, geometry::segment_distance(d->vertex(i), d->vertex(e), d->next(e)));
    }
    const double r_hi = frac * r;
    const auto fr = geometry::corner_frame(hull, *d, d->vertex(i));
    auto sd = corner::make_singularity_data(fr, sol.scatterer.gamma());
    corner::FitWindow w;
    w.r_lo = r_hi / 20;
    w.r_hi = r_hi;
    const auto fit = corner::extract_singularity_coefficient(sol, sd, w);
    out.push_back({i, a, sd.eta, fit.K, fit.residual, fit.low_confidence});
  }
  return out;
}

// ---- perturbations ----------------------------------------------------------

Polygon PerturbationFamily::apply(const Polygon& p, double step) const {
  std::vector<Vec2> v = p.vertices();
  switch (kind) {
    case Kind::translation: {
      const Vec2 d = direction.unit();
      for (auto& x : v) x += d * step;
      break;
    }
    case Kind::vertex_pull: {
      if (vertex >= v.size()) throw ConfigError("vertex_pull: vertex index out of range");
      const Vec2 c = p.centroid();
      v[vertex] += (v[vertex] - c).unit() * step;
      break;
    }
    case Kind::dilation: {
      const Vec2 c = p.centroid();
      for (auto& x : v) x = c + (x - c) * (1.0 + step);
      break;
    }
  }
  return Polygon(std::move(v));
}

PerturbationFamily::Kind PerturbationFamily::parse_kind(const std::string& s) {
  if (s == "translation") return Kind::translation;
  if (s == "vertex_pull") return Kind::vertex_pull;
  if (s == "dilation") return Kind::dilation;
  throw ConfigError("unknown perturbation family '" + s + "' (translation | vertex_pull | dilation)");
}

std::string PerturbationFamily::kind_name(Kind k) {
  switch (k) {
    case Kind::translation: return "translation";
    case Kind::vertex_pull: return "vertex_pull";
    case Kind::dilation: return "dilation";
  }
  return "?";
}

namespace {

double bound_radius(const SweepOptions& o, double fallback) {
  return o.radius > 0 ? o.radius : 1.05 * fallback;
}

double max_panel(const forward::BoundaryMesh& m) {
  double r = 0;
  for (const auto& p : m.panels()) r = std::max(r, p.length);
  return r;
}

double min_abs_k(const std::vector<CornerCoefficient>& c) {
  double m = 1e300;
  for (const auto& x : c) m = std::min(m, std::abs(x.K));
  return c.empty() ? 0.0 : m;
}

}  // namespace

StabilityResult run_stability_sweep(const Scatterer& base, const PerturbationFamily& family,
                                    const IncidentField& inc, const SweepOptions& opts) {
  const auto* d = base.polygon();
  if (!d) throw ContractViolation("stability sweep: base scatterer must be a polygon");
  if (family.steps.empty()) throw ConfigError("stability sweep: no perturbation steps");
  StabilityResult res;
  res.table.experiment = "stability";
  res.table.columns = {"step", "d_H", "epsilon", "S", "K_m", "delta"};

  double rmax = d->max_radius();
  for (double s : family.steps) rmax = std::max(rmax, family.apply(*d, s).max_radius());
  res.s = inc.amplitude_s(bound_radius(opts, rmax));
  res.floor = calibrate_floor(base, inc, opts.mesh, opts.solve, opts.farfield_samples);

  const auto sol = solve_scattering(base, inc, opts.mesh, opts.solve);
  const auto ff = far_field(sol, opts.farfield_samples);
  const auto kb = corner_coefficients(sol);
  res.eta_m = 1.0;
  for (const auto& c : kb) res.eta_m = std::min(res.eta_m, c.eta);
  const double resolution = max_panel(*sol.mesh);

  res.table.records.resize(family.steps.size());
  detail::parallel_for(family.steps.size(), opts.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto& rec = res.table.records[i];
      const double step = family.steps[i];
      rec.id = "p" + std::to_string(i);
      rec.values = {step, 0, 0, res.s, 0, kNoDelta};
      try {
        const Polygon dp = family.apply(*d, step);
        const Scatterer sp(dp, base.gamma(), base.q());
        const auto v = forward::scatterer_violations(sp, opts.bounds);
        if (!v.empty()) throw ContractViolation("perturbed polygon inadmissible: " + v.front());
        const auto s2 = solve_scattering(sp, inc, opts.mesh, opts.solve);
        const double eps = farfield_l2_distance(ff, far_field(s2, opts.farfield_samples));
        const double dh = geometry::hausdorff_distance(*d, dp);
        const double km = std::min(min_abs_k(kb), min_abs_k(corner_coefficients(s2)));
        rec.values = {step, dh, eps, res.s, km, delta_axis(res.s, eps, res.eta_m)};
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  });

  std::vector<double> dh, eps, fx, fy;
  for (const auto& r : res.table.records) {
    if (r.failed) {
      ++res.failures;
      continue;
    }
    dh.push_back(r.values[1]);
    eps.push_back(r.values[2]);
    if (r.values[2] < 2 * res.floor.value && r.values[1] >= resolution) res.uniqueness_ok = false;
    const double del = delta_axis(res.s, r.values[2], 1.0);
    if (del != kNoDelta && r.values[1] > 0) {
      fx.push_back(std::log(del));
      fy.push_back(std::log(r.values[1]));
    }
  }
  res.spearman = spearman(dh, eps);
  res.fit = least_squares(fx, fy);
  res.beta = res.fit.slope;
  return res;
}

CornerBoundResult run_corner_bound_sweep(std::span<const Scatterer> scatterers,
                                         std::span<const double> incidences, double k,
                                         const SweepOptions& opts, double k_threshold) {
  if (scatterers.empty() || incidences.empty())
    throw ConfigError("corner-bound sweep: need at least one scatterer and one incidence");
  CornerBoundResult res;
  res.table.experiment = "corner-bound";
  res.table.columns = {"scatterer", "incidence", "farfield_norm", "S", "K_abs", "eta", "ratio", "flagged"};
  double rmax = 0;
  for (const auto& s : scatterers) rmax = std::max(rmax, forward::shape_radius(s.shape()));
  std::vector<IncidentField> incs;
  for (double a : incidences) incs.push_back(IncidentField::plane_wave(k, a));
  const double S = incs.front().amplitude_s(bound_radius(opts, rmax));
  res.floor = calibrate_floor(scatterers.front(), incs.front(), opts.mesh, opts.solve,
                              opts.farfield_samples);

  const std::size_t ni = incs.size();
  res.table.records.resize(scatterers.size() * ni);
  detail::parallel_for(scatterers.size(), opts.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      try {
        const auto mesh = forward::make_mesh(scatterers[s], k, opts.mesh);
        const auto sols = forward::solve_scattering_many(scatterers[s], incs, mesh, opts.solve);
        for (std::size_t i = 0; i < ni; ++i) {
          auto& rec = res.table.records[s * ni + i];
          rec.id = "s" + std::to_string(s) + "d" + std::to_string(i);
          const double nrm = far_field(sols[i], opts.farfield_samples).l2_norm();
          double kabs = 0, eta = 0;
          for (const auto& c : corner_coefficients(sols[i]))
            if (std::abs(c.K) > kabs) {
              kabs = std::abs(c.K);
              eta = c.eta;
            }
          const bool flagged = kabs < k_threshold;
          rec.values = {double(s), incidences[i], nrm, S, kabs, eta, nrm / S, flagged ? 1.0 : 0.0};
        }
      } catch (const std::exception& e) {
        for (std::size_t i = 0; i < ni; ++i) {
          auto& rec = res.table.records[s * ni + i];
          rec.id = "s" + std::to_string(s) + "d" + std::to_string(i);
          rec.values = {double(s), incidences[i], 0, S, 0, 0, 0, 1};
          rec.failed = true;
          rec.error = e.what();
        }
      }
    }
  });
  res.min_ratio = res.min_norm = 1e300;
  for (const auto& r : res.table.records) {
    if (r.failed) {
      ++res.failures;
      continue;
    }
    if (r.values[7] != 0) continue;
    ++res.counted;
    res.min_norm = std::min(res.min_norm, r.values[2]);
    res.min_ratio = std::min(res.min_ratio, r.values[6]);
  }
  if (res.counted == 0) res.min_ratio = res.min_norm = 0;
  return res;
}

SmallnessResult run_smallness_probe(const Scatterer& base, const PerturbationFamily& family,
                                    const IncidentField& inc, const SmallnessOptions& opts) {
  const auto* d = base.polygon();
  if (!d) throw ContractViolation("smallness probe: base scatterer must be a polygon");
  SmallnessResult res;
  res.table.experiment = "smallness";
  res.table.columns = {"step", "epsilon", "sup_annulus", "sup_hull", "grad_sup_hull"};

  // fixed node sets: a circle and the offset curve of the hull of the whole family
  std::vector<Vec2> all = d->vertices();
  for (double s : family.steps) {
    const auto p = family.apply(*d, s);
    all.insert(all.end(), p.vertices().begin(), p.vertices().end());
  }
  const auto hull = geometry::convex_hull(all);
  const double ra = opts.annulus_radius > 0 ? opts.annulus_radius : 1.5 * hull.max_radius();
  std::vector<Vec2> ann, off;
  for (int j = 0; j < opts.annulus_nodes; ++j) ann.push_back(polar(ra, 2.0 * kPi * j / opts.annulus_nodes));
  const double per = [&] {
    double s = 0;
    for (std::size_t e = 0; e < hull.size(); ++e) s += hull.edge_length(e);
    return s;
  }();
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const int m = std::max(1, static_cast<int>(std::round(opts.hull_nodes * hull.edge_length(e) / per)));
    const Vec2 a = hull.vertex(e), b = hull.next(e);
    const Vec2 t = (b - a).unit();
    const Vec2 nrm{t.y, -t.x};
    for (int j = 0; j < m; ++j) off.push_back(a + (b - a) * ((j + 0.5) / m) + nrm * opts.hull_distance);
  }
  std::vector<Vec2> pts = ann;
  pts.insert(pts.end(), off.begin(), off.end());

  const auto& so = opts.sweep;
  const auto sol = solve_scattering(base, inc, so.mesh, so.solve);
  const auto ff = far_field(sol, so.farfield_samples);
  const auto f0 = forward::evaluate_field(sol, pts);

  res.table.records.resize(family.steps.size());
  detail::parallel_for(family.steps.size(), so.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto& rec = res.table.records[i];
      rec.id = "p" + std::to_string(i);
      rec.values = {family.steps[i], 0, 0, 0, 0};
      try {
        const Scatterer sp(family.apply(*d, family.steps[i]), base.gamma(), base.q());
        const auto v = forward::scatterer_violations(sp, so.bounds);
        if (!v.empty()) throw ContractViolation("perturbed polygon inadmissible: " + v.front());
        const auto s2 = solve_scattering(sp, inc, so.mesh, so.solve);
        const double eps = farfield_l2_distance(ff, far_field(s2, so.farfield_samples));
        const auto f1 = forward::evaluate_field(s2, pts);
        double sa = 0, sh = 0, gh = 0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
          const double du = std::abs(f0[j].value - f1[j].value);
          if (j < ann.size()) {
            sa = std::max(sa, du);
          } else {
            sh = std::max(sh, du);
            const double g = std::hypot(std::abs(f0[j].gradient.x - f1[j].gradient.x),
                                        std::abs(f0[j].gradient.y - f1[j].gradient.y));
            gh = std::max(gh, g * opts.hull_distance);
          }
        }
        rec.values = {family.steps[i], eps, sa, sh, gh};
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  });
  for (const auto& r : res.table.records)
    if (r.failed) ++res.failures;
  res.spearman = spearman(res.table.column("epsilon"), res.table.column("sup_annulus"));
  return res;
}

// ---- Herglotz blow-up -------------------------------------------------------

namespace {

// log-log interpolation of y(x) on points sorted by x; clamped at the ends
double loglog_interp(const std::vector<std::pair<double, double>>& xy, double x) {
  if (x <= xy.front().first) return xy.front().second;
  if (x >= xy.back().first) return xy.back().second;
  for (std::size_t i = 0; i + 1 < xy.size(); ++i) {
    const auto [x0, y0] = xy[i];
    const auto [x1, y1] = xy[i + 1];
    if (x >= x0 && x <= x1) {
      if (x1 == x0) return std::max(y0, y1);
      const double t = (std::log(x) - std::log(x0)) / (std::log(x1) - std::log(x0));
      return std::exp((1 - t) * std::log(y0) + t * std::log(y1));
    }
  }
  return xy.back().second;
}

}  // namespace

BlowupResult run_herglotz_blowup(const BlowupSpec& spec) {
  BlowupResult res;
  std::vector<double> lam = spec.lambdas;
  if (lam.empty())
    for (int e = -2; e >= -12; --e) lam.push_back(std::pow(10.0, e));
  for (double l : lam)
    if (!(l > 0)) throw ConfigError("herglotz-blowup: lambda must be > 0");

  const auto& d = spec.domain;
  const auto hull = geometry::convex_hull(d.vertices());
  if (spec.vertex >= d.size()) throw ConfigError("herglotz-blowup: vertex index out of range");
  const auto fr = geometry::corner_frame(hull, d, d.vertex(spec.vertex));
  auto sd = corner::make_singularity_data(fr, spec.gamma);
  sd.K = 1.0;
  res.eta = sd.eta;

  const auto g = herglotz::HerglotzDensity::trigonometric(spec.directions, spec.smooth_modes);
  herglotz::GridSamples reg = herglotz::GridSamples::on_polygon(d, spec.grid_spacing);
  reg.sample([&](Vec2 x) { return herglotz::herglotz_wave(g, spec.k, x); });
  herglotz::GridSamples sing = reg;
  sing.sample([&](Vec2 x) { return herglotz::herglotz_wave(g, spec.k, x) + sd.singular_value(x); });

  // both targets normalised to unit discrete H1 norm
  const double nr = reg.h1_norm(), ns = sing.h1_norm();
  if (!(nr > 0) || !(ns > 0)) throw DomainError("herglotz-blowup: zero target");
  for (auto& v : reg.values) v /= nr;
  for (auto& v : sing.values) v /= ns;
  res.smooth_norm = g.l2_norm() / nr;

  const herglotz::HerglotzFitter fr_reg(reg, spec.k, spec.directions);
  const herglotz::HerglotzFitter fr_sing(sing, spec.k, spec.directions);
  for (double l : lam) {
    const auto a = fr_reg.fit(l), b = fr_sing.fit(l);
    res.regular.push_back({l, a.epsilon, a.g_norm});
    res.singular.push_back({l, b.epsilon, b.g_norm});
  }

  // matching curve for the regular target on a denser lambda grid, extended
  // upward until it covers every singular epsilon (no clamped extrapolation)
  double eps_max = 0;
  for (const auto& r : res.singular) eps_max = std::max(eps_max, r.epsilon);
  std::vector<std::pair<double, double>> curve;
  const double lmin = *std::min_element(lam.begin(), lam.end());
  for (double l = *std::max_element(lam.begin(), lam.end()); l >= lmin * 0.99; l /= std::pow(10.0, 0.25)) {
    const auto a = fr_reg.fit(l);
    curve.emplace_back(a.epsilon, a.g_norm);
  }
  for (double l = *std::max_element(lam.begin(), lam.end()) * std::pow(10.0, 0.25);
       l < 1e8 && std::max_element(curve.begin(), curve.end())->first < eps_max; l *= std::pow(10.0, 0.25)) {
    const auto a = fr_reg.fit(l);
    curve.emplace_back(a.epsilon, a.g_norm);
  }
  std::sort(curve.begin(), curve.end());
  for (const auto& r : res.singular) {
    const double m = loglog_interp(curve, r.epsilon);
    res.matched_regular.push_back(m);
    if (r.g_norm < m) res.singular_dominates = false;
  }
  for (const auto& r : res.regular)
    if (r.g_norm > 2 * res.smooth_norm) res.regular_bounded = false;
  // rows follow the lambda grid; monotone along decreasing epsilon
  std::vector<herglotz::BlowupRow> s = res.singular;
  std::sort(s.begin(), s.end(), [](auto x, auto y) { return x.epsilon > y.epsilon; });
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].g_norm < s[i - 1].g_norm * (1 - 1e-12)) res.singular_monotone = false;
  return res;
}

}  // namespace scatterlab::experiments
