#include <algorithm>
#include <cmath>
#include <numeric>

#include "scatterlab/forward.hpp"
#include "scatterlab/quadrature.hpp"

namespace scatterlab::forward {

namespace {

// Winding test without the tolerance band used by Polygon::contains.
bool polygon_strictly_contains(const Polygon& p, Vec2 x) {
  bool inside = false;
  const auto& v = p.vertices();
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > x.y) != (v[j].y > x.y)) {
      const double xc = v[i].x + (x.y - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
      if (x.x < xc) inside = !inside;
    }
  }
  return inside;
}

double wrap_angle(double t) {
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return t;
}

}  // namespace

bool shape_contains(const Shape& s, Vec2 p) {
  if (const auto* poly = std::get_if<Polygon>(&s)) return polygon_strictly_contains(*poly, p);
  const auto& c = std::get<Circle>(s);
  return distance(p, c.center) < c.radius;
}

double shape_boundary_distance(const Shape& s, Vec2 p) {
  if (const auto* poly = std::get_if<Polygon>(&s)) return poly->boundary_distance(p);
  const auto& c = std::get<Circle>(s);
  return std::abs(distance(p, c.center) - c.radius);
}

double shape_radius(const Shape& s) {
  if (const auto* poly = std::get_if<Polygon>(&s)) return poly->max_radius();
  const auto& c = std::get<Circle>(s);
  return c.center.norm() + c.radius;
}

// ---- Scatterer ------------------------------------------------------------

Scatterer::Scatterer(Shape shape, double gamma, double q)
    : shape_(std::move(shape)), gamma_(gamma), q_(q) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("scatterer: gamma must be > 0");
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("scatterer: q must be > 0");
  if (gamma == 1.0 && q != 1.0)
    throw DomainError("scatterer: gamma = 1 is inadmissible (gamma != 1 required) unless q = 1 as well");
  if (const auto* c = std::get_if<Circle>(&shape_))
    if (!(c->radius > 0.0)) throw DegenerateGeometry("scatterer: circle radius must be > 0");
}

std::vector<std::string> scatterer_violations(const Scatterer& s, const ScattererBounds& b) {
  std::vector<std::string> out;
  if (s.gamma() == 1.0) out.push_back("gamma != 1 violated (no contrast in sigma)");
  if (!(s.gamma() > b.gamma_min)) out.push_back("gamma above gamma_m violated");
  if (!(s.gamma() < b.gamma_max)) out.push_back("gamma below gamma_M violated");
  if (s.q() > b.q_max) out.push_back("q bounded by Q violated");
  if (const auto* poly = s.polygon()) {
    auto g = geometry::polygon_violations(*poly, b.polygon);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

// ---- IncidentField -------------------------------------------------------

IncidentField::IncidentField(double k, std::vector<PlaneWave> waves, Kind kind)
    : k_(k), waves_(std::move(waves)), kind_(kind) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("incident field: k must be > 0");
  for (auto& w : waves_) {
    const double n = w.direction.norm();
    if (!(n > 0.0)) throw DomainError("incident field: zero direction");
    w.direction = w.direction / n;
  }
}

IncidentField IncidentField::plane_wave(double k, double angle, cplx amplitude) {
  return IncidentField(k, {PlaneWave{polar(1.0, angle), amplitude}}, Kind::plane);
}

IncidentField IncidentField::herglotz(double k, std::span<const cplx> density) {
  if (density.empty()) throw DomainError("herglotz: empty density");
  const std::size_t m = density.size();
  std::vector<PlaneWave> w(m);
  for (std::size_t j = 0; j < m; ++j)
    w[j] = {polar(1.0, 2.0 * kPi * j / m), density[j] * (2.0 * kPi / m)};
  return IncidentField(k, std::move(w), Kind::herglotz);
}

cplx IncidentField::value(Vec2 x) const {
  cplx s = 0.0;
  for (const auto& w : waves_) s += w.amplitude * std::exp(kI * (k_ * dot(w.direction, x)));
  return s;
}

CVec2 IncidentField::gradient(Vec2 x) const {
  CVec2 g;
  for (const auto& w : waves_) {
    const cplx e = kI * k_ * w.amplitude * std::exp(kI * (k_ * dot(w.direction, x)));
    g.x += e * w.direction.x;
    g.y += e * w.direction.y;
  }
  return g;
}

std::array<cplx, 3> IncidentField::hessian(Vec2 x) const {
  std::array<cplx, 3> h{};
  for (const auto& w : waves_) {
    const cplx e = -k_ * k_ * w.amplitude * std::exp(kI * (k_ * dot(w.direction, x)));
    h[0] += e * w.direction.x * w.direction.x;
    h[1] += e * w.direction.x * w.direction.y;
    h[2] += e * w.direction.y * w.direction.y;
  }
  return h;
}

IncidentField IncidentField::scaled(cplx s) const {
  auto w = waves_;
  for (auto& p : w) p.amplitude *= s;
  return IncidentField(k_, std::move(w), kind_);
}

IncidentField IncidentField::operator+(const IncidentField& o) const {
  if (std::abs(o.k_ - k_) > 1e-14 * k_)
    throw ContractViolation("incident field: superposition requires equal wavenumbers");
  auto w = waves_;
  w.insert(w.end(), o.waves_.begin(), o.waves_.end());
  return IncidentField(k_, std::move(w), Kind::superposition);
}

double IncidentField::amplitude_s(double R) const {
  if (!(R > 0.0)) throw DomainError("amplitude_s: R must be > 0");
  const double rb = 2.0 * R;
  const int nr = 24 + static_cast<int>(std::ceil(2.0 * k_ * rb));
  const int nt = 48 + 2 * static_cast<int>(std::ceil(2.0 * k_ * rb));
  const auto rule = quad::gauss_on(0.0, rb, nr);
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = rule.nodes[i];
    double ring = 0.0;
    for (int j = 0; j < nt; ++j) {
      const Vec2 x = polar(r, 2.0 * kPi * j / nt);
      const cplx u = value(x);
      const CVec2 g = gradient(x);
      const auto h = hessian(x);
      ring += std::norm(u) + std::norm(g.x) + std::norm(g.y) + std::norm(h[0]) +
              2.0 * std::norm(h[1]) + std::norm(h[2]);
    }
    sum += rule.weights[i] * r * ring * (2.0 * kPi / nt);
  }
  return std::sqrt(sum);
}

// ---- Panels and mesh ----------------------------------------------------

Vec2 Panel::point(double t) const {
  if (!arc) return a + (b - a) * (0.5 * (t + 1.0));
  const double th = t0 + 0.5 * (t + 1.0) * (t1 - t0);
  return center + polar(radius, th);
}

Vec2 Panel::normal(double t) const {
  if (!arc) {
    const Vec2 tan = (b - a) / length;
    return {tan.y, -tan.x};  // CCW boundary: outward normal is the clockwise rotation
  }
  return polar(1.0, t0 + 0.5 * (t + 1.0) * (t1 - t0));
}

double Panel::distance_to(Vec2 p) const {
  if (!arc) return geometry::segment_distance(p, a, b);
  const Vec2 d = p - center;
  const double rel = wrap_angle(d.angle() - t0);
  if (rel <= t1 - t0) return std::abs(d.norm() - radius);
  return std::min(distance(p, a), distance(p, b));
}

double Panel::closest_param(Vec2 p) const {
  if (!arc) {
    const Vec2 ab = b - a;
    const double t = 2.0 * dot(p - a, ab) / ab.norm2() - 1.0;
    return std::clamp(t, -1.0, 1.0);
  }
  const double span = t1 - t0;
  const double rel = wrap_angle((p - center).angle() - t0);
  if (rel <= span) return 2.0 * rel / span - 1.0;
  return (rel - span < 2.0 * kPi - rel) ? 1.0 : -1.0;
}

BoundaryMesh::BoundaryMesh(Shape shape, double k_max, const MeshOptions& opts)
    : shape_(std::move(shape)), opts_(opts) {
  if (opts.order < 2 || opts.order > 40) throw DomainError("mesh: order must be in [2, 40]");
  if (!(opts.nodes_per_wavelength > 0)) throw DomainError("mesh: nodes_per_wavelength must be > 0");
  if (opts.min_panels < 1) throw DomainError("mesh: min_panels must be >= 1");
  if (!(opts.grading_exponent >= 1.0)) throw DomainError("mesh: grading exponent must be >= 1");
  if (opts.refinement < 0 || opts.refinement > 8) throw DomainError("mesh: refinement out of range");
  if (!(k_max > 0)) throw DomainError("mesh: wavenumber must be > 0");

  const double wavelength = 2.0 * kPi / k_max;
  const double hmax = opts.order * wavelength / opts.nodes_per_wavelength;
  const int scale = 1 << opts.refinement;

  if (const auto* c = std::get_if<Circle>(&shape_)) {
    const double perim = 2.0 * kPi * c->radius;
    const int n = std::max(opts.min_panels, static_cast<int>(std::ceil(perim / hmax))) * scale;
    for (int i = 0; i < n; ++i) {
      Panel p;
      p.arc = true;
      p.center = c->center;
      p.radius = c->radius;
      p.t0 = 2.0 * kPi * i / n;
      p.t1 = 2.0 * kPi * (i + 1) / n;
      p.a = c->center + polar(c->radius, p.t0);
      p.b = c->center + polar(c->radius, p.t1);
      p.length = c->radius * (p.t1 - p.t0);
      panels_.push_back(p);
    }
  } else {
    const auto& poly = std::get<Polygon>(shape_);
    const double pg = opts.grading_exponent;
    for (std::size_t e = 0; e < poly.size(); ++e) {
      const Vec2 va = poly.vertex(e), vb = poly.next(e);
      const double len = distance(va, vb);
      const double half = 0.5 * len;
      const int m0 = std::max(opts.min_panels, static_cast<int>(std::ceil(pg * half / hmax)));
      const int m = m0 * scale;
      // arclength breakpoints along the edge from va
      std::vector<double> s;
      for (int j = 0; j <= m; ++j) s.push_back(half * std::pow(double(j) / m, pg));
      for (int j = m - 1; j >= 0; --j) s.push_back(len - half * std::pow(double(j) / m, pg));
      const Vec2 dir = (vb - va) / len;
      for (std::size_t j = 0; j + 1 < s.size(); ++j) {
        Panel p;
        p.a = va + dir * s[j];
        p.b = va + dir * s[j + 1];
        p.edge = static_cast<int>(e);
        p.length = s[j + 1] - s[j];
        panels_.push_back(p);
      }
    }
  }

  const auto& g = quad::gauss_legendre(opts.order);
  for (const auto& p : panels_) {
    for (int q = 0; q < opts.order; ++q) {
      points_.push_back(p.point(g.nodes[q]));
      normals_.push_back(p.normal(g.nodes[q]));
      weights_.push_back(g.weights[q] * p.speed());
    }
  }
}

double BoundaryMesh::min_panel_length() const {
  double m = 1e300;
  for (const auto& p : panels_) m = std::min(m, p.length);
  return m;
}

std::size_t BoundaryMesh::nodes_on_edge(int e) const {
  std::size_t n = 0;
  for (const auto& p : panels_)
    if (p.edge == e) n += opts_.order;
  return n;
}

}  // namespace scatterlab::forward
