#include "scatterlab/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "scatterlab/io.hpp"
#include "scatterlab/quadrature.hpp"

namespace scatterlab::geometry {

namespace {

double signed_area(const std::vector<Vec2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double o = cross(b - a, c - a);
  if (std::abs(o) <= kGeomTol * std::max(1.0, (b - a).norm() * (c - a).norm())) return 0;
  return o > 0 ? 1 : -1;
}

bool on_segment(Vec2 p, Vec2 a, Vec2 b) { return segment_distance(p, a, b) <= kGeomTol; }

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d);
}

double wrap_two_pi(double t) {
  t = std::fmod(t, 2.0 * kPi);
  return t < 0 ? t + 2.0 * kPi : t;
}

}  // namespace

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = ab.norm2();
  double t = l2 > 0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() > 3 && vertices_.front() == vertices_.back()) vertices_.pop_back();
  if (vertices_.size() < 3) throw DegenerateGeometry("polygon needs at least 3 vertices");
  for (const Vec2& v : vertices_)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw DegenerateGeometry("polygon vertex is not finite");
  const double a = signed_area(vertices_);
  if (std::abs(a) <= kGeomTol) throw DegenerateGeometry("polygon has zero area");
  if (a < 0) std::reverse(vertices_.begin(), vertices_.end());
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(vertex(i), next(i)) <= kGeomTol)
      throw DegenerateGeometry("polygon has a repeated vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertex(i), next(i), vertex(j), next(j)))
        throw DegenerateGeometry("polygon is self-intersecting");
    }
  }
}

double Polygon::min_edge_length() const {
  double m = 1e300;
  for (std::size_t i = 0; i < size(); ++i) m = std::min(m, edge_length(i));
  return m;
}

double Polygon::interior_angle(std::size_t i) const {
  const Vec2 v = vertex(i);
  const Vec2 e1 = next(i) - v, e2 = prev(i) - v;
  return wrap_two_pi(std::atan2(cross(e1, e2), dot(e1, e2)));
}

bool Polygon::is_convex() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (interior_angle(i) >= kPi - 1e-12) return false;
  return true;
}

double Polygon::area() const { return signed_area(vertices_); }

double Polygon::max_radius() const {
  double r = 0.0;
  for (const Vec2& v : vertices_) r = std::max(r, v.norm());
  return r;
}

Vec2 Polygon::centroid() const {
  Vec2 c;
  double a6 = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = cross(vertex(i), next(i));
    c += (vertex(i) + next(i)) * w;
    a6 += 3.0 * w;
  }
  return c / a6;
}

double Polygon::boundary_distance(Vec2 p) const {
  double d = 1e300;
  for (std::size_t i = 0; i < size(); ++i) d = std::min(d, segment_distance(p, vertex(i), next(i)));
  return d;
}

bool Polygon::contains(Vec2 p) const {
  if (boundary_distance(p) <= kGeomTol) return true;
  bool inside = false;
  for (std::size_t i = 0, j = size() - 1; i < size(); j = i++) {
    const Vec2 a = vertices_[i], b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double Polygon::region_distance(Vec2 p) const { return contains(p) ? 0.0 : boundary_distance(p); }

std::optional<std::size_t> Polygon::find_vertex(Vec2 p, double tol) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (distance(vertices_[i], p) <= tol) return i;
  return std::nullopt;
}

Polygon Polygon::translated(Vec2 t) const {
  std::vector<Vec2> v = vertices_;
  for (Vec2& p : v) p += t;
  return Polygon(std::move(v));
}

std::vector<std::string> polygon_violations(const Polygon& p, const PolygonBounds& b) {
  std::vector<std::string> out;
  if (!p.is_convex()) out.push_back("polygon is not convex");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p.interior_angle(i);
    if (a <= b.angle_min)
      out.push_back("angle below a_m at vertex " + std::to_string(i));
    if (a >= b.angle_max)
      out.push_back("angle above a_M at vertex " + std::to_string(i));
    if (p.edge_length(i) < b.min_edge)
      out.push_back("length of each edge at least l violated at edge " + std::to_string(i));
  }
  if (p.max_radius() >= b.radius) out.push_back("polygon not strictly inside B_R");
  return out;
}

Polygon convex_hull(std::span<const Vec2> points) {
  if (points.size() < 3) throw DegenerateGeometry("convex hull needs at least 3 points");
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  auto turn = [](Vec2 o, Vec2 a, Vec2 b) { return cross(a - o, b - o); };
  const double eps = kGeomTol * kGeomTol;
  for (const Vec2& p : pts) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p) <= eps) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
    h[k++] = pts[i];
  }
  h.resize(k > 0 ? k - 1 : 0);
  if (h.size() < 3) throw DegenerateGeometry("convex hull of collinear points");
  double a = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) a += cross(h[i], h[(i + 1) % h.size()]);
  if (std::abs(a) <= kGeomTol) throw DegenerateGeometry("convex hull of collinear points");
  return Polygon(std::move(h));
}

double hausdorff_distance(const Polygon& a, const Polygon& b) {
  if (!a.is_convex() || !b.is_convex())
    throw ContractViolation("hausdorff_distance: exact route requires convex polygons");
  double d = 0.0;
  for (const Vec2& v : a.vertices()) d = std::max(d, b.region_distance(v));
  for (const Vec2& v : b.vertices()) d = std::max(d, a.region_distance(v));
  return d;
}

std::size_t farthest_vertex(const Polygon& a, const Polygon& b) {
  std::size_t best = 0;
  double d = -1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double di = b.region_distance(a.vertex(i));
    if (di > d) d = di, best = i;
  }
  return best;
}

Vec2 CornerFrame::to_frame(Vec2 p) const {
  const Vec2 d = p - vertex;
  return {dot(d, x_hat), dot(d, y_hat)};
}

Vec2 CornerFrame::from_frame(Vec2 q) const { return vertex + x_hat * q.x + y_hat * q.y; }

double CornerFrame::frame_angle(Vec2 p) const { return to_frame(p).angle(); }

CornerFrame corner_frame(const Polygon& hull, const Polygon& d, Vec2 vertex) {
  const auto iq = hull.find_vertex(vertex);
  if (!iq) throw ContractViolation("corner_frame: point is not a vertex of the hull Q");
  const auto id = d.find_vertex(vertex);
  if (!id) throw ContractViolation("corner_frame: point is not a vertex of D");
  CornerFrame f;
  f.vertex = hull.vertex(*iq);
  f.opening = d.interior_angle(*id);
  f.hull_opening = hull.interior_angle(*iq);
  if (f.hull_opening >= kPi) throw ContractViolation("corner_frame: hull corner is flat");
  if (f.hull_opening < f.opening - 1e-9)
    throw ContractViolation("corner_frame: D is not contained in Q at the vertex");
  if (f.hull_opening > 0.5 * (f.opening + kPi) + 1e-9)
    throw ContractViolation("corner_frame: hull opening exceeds (a + pi) / 2");
  const Vec2 e1 = (hull.next(*iq) - f.vertex).unit(), e2 = (hull.prev(*iq) - f.vertex).unit();
  f.x_hat = (e1 + e2).unit();
  f.y_hat = f.x_hat.perp();
  f.alpha_prime = std::cos(0.25 * (kPi + f.hull_opening));
  f.theta_minus = f.frame_angle(d.next(*id));
  f.theta_plus = f.theta_minus + f.opening;
  return f;
}

double CurveQuadrature::length() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double AreaQuadrature::area() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double contour_tau0(double h, double hull_opening) {
  return 1.0 / (2.0 * h * std::sin(0.25 * (kPi - hull_opening)));
}

namespace {

// Radial rule on [0, rmax] graded toward 0, as fractions of rmax.
quad::Rule radial_rule(const ContourOptions& o) {
  return quad::graded_on(0.0, 1.0, o.order, o.grading, true, false, 0.3);
}

void add_ray(CurveQuadrature& c, const CornerFrame& f, double theta, double h, Vec2 normal_local,
             const ContourOptions& o) {
  const quad::Rule r = quad::graded_on(0.0, h, o.order, o.grading, true, false, 0.3);
  const Vec2 dir = f.from_frame(polar(1.0, theta)) - f.vertex;
  const Vec2 nrm = f.from_frame(normal_local) - f.vertex;
  for (std::size_t i = 0; i < r.size(); ++i) {
    c.points.push_back(f.vertex + dir * r.nodes[i]);
    c.normals.push_back(nrm);
    c.weights.push_back(r.weights[i]);
  }
}

void add_arc(CurveQuadrature& c, const CornerFrame& f, double h, double t0, double t1,
             const ContourOptions& o) {
  if (t1 <= t0) return;
  // pieces end at the edges of D, so the integrand is smooth on each
  for (int p = 0; p < o.panels; ++p) {
    const quad::Rule r = quad::gauss_on(t0 + (t1 - t0) * p / o.panels,
                                        t0 + (t1 - t0) * (p + 1) / o.panels, o.order);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec2 u = polar(1.0, r.nodes[i]);
      c.points.push_back(f.from_frame(u * h));
      c.normals.push_back(f.from_frame(u) - f.vertex);
      c.weights.push_back(r.weights[i] * h);
    }
  }
}

template <class Radius>
void add_polar(AreaQuadrature& a, const CornerFrame& f, double t0, double t1, Radius rmax,
               const ContourOptions& o) {
  if (t1 <= t0) return;
  const quad::Rule rr = radial_rule(o);
  for (int p = 0; p < o.panels; ++p) {
    const quad::Rule th = quad::gauss_on(t0 + (t1 - t0) * p / o.panels,
                                         t0 + (t1 - t0) * (p + 1) / o.panels, o.order);
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double R = rmax(th.nodes[i]);
      const Vec2 u = polar(1.0, th.nodes[i]);
      for (std::size_t j = 0; j < rr.size(); ++j) {
        const double r = rr.nodes[j] * R;
        a.points.push_back(f.from_frame(u * r));
        a.weights.push_back(th.weights[i] * rr.weights[j] * R * r);
      }
    }
  }
}

}  // namespace

ContourSet build_contours(const CornerFrame& frame, const Polygon& d, const Polygon& hull, double h,
                          double tau, const ContourOptions& opts, const Polygon* other) {
  if (!(h > 0)) throw DomainError("build_contours: radius h must be positive");
  const double b = frame.hull_opening;
  const double tau0 = contour_tau0(h, b);
  if (!(tau >= tau0 * (1.0 - 1e-12)))
    throw DomainError("build_contours: tau below tau0 = " + std::to_string(tau0));
  const auto id = d.find_vertex(frame.vertex);
  if (!id || !hull.find_vertex(frame.vertex))
    throw ContractViolation("build_contours: frame vertex is not a vertex of D and Q");
  // B(x_c, h) must cut D in exactly the corner sector.
  const std::size_t n = d.size();
  for (std::size_t e = 0; e < n; ++e) {
    const bool adjacent = (e == *id) || ((e + 1) % n == *id);
    if (adjacent) {
      if (d.edge_length(e) <= h) throw ContractViolation("build_contours: edge shorter than h");
    } else if (segment_distance(frame.vertex, d.vertex(e), d.next(e)) < h - kGeomTol) {
      throw ContractViolation("build_contours: B(x_c, h) meets a non-adjacent edge of D");
    }
  }
  if (other && other->region_distance(frame.vertex) < h - kGeomTol)
    throw ContractViolation("build_contours: B(x_c, h) intersects D'");

  ContourSet cs;
  cs.h = h;
  cs.tau = tau;
  cs.tau0 = tau0;
  cs.frame = frame;
  const double beta = 0.25 * (kPi + b);
  const double tp = frame.theta_plus, tm = frame.theta_minus;

  // circle through (h, +-beta) and (-1/tau, 0), frame coordinates
  const double inv = 1.0 / tau;
  const double x0 = (h * h - inv * inv) / (2.0 * (h * std::cos(beta) + inv));
  cs.arc.center_x = x0;
  cs.arc.radius = x0 + inv;
  cs.arc.start_angle = std::atan2(h * std::sin(beta), h * std::cos(beta) - x0);
  cs.arc.sweep = 2.0 * (kPi - cs.arc.start_angle);

  add_ray(cs.gamma_plus, frame, tp, h, polar(1.0, tp + 0.5 * kPi), opts);
  add_ray(cs.gamma_minus, frame, tm, h, polar(1.0, tm - 0.5 * kPi), opts);

  add_arc(cs.inner_arc_d, frame, h, tm, tp, opts);
  add_arc(cs.inner_arc_q, frame, h, -beta, tm, opts);
  add_arc(cs.inner_arc_q, frame, h, tm, tp, opts);
  add_arc(cs.inner_arc_q, frame, h, tp, beta, opts);

  {
    const double a0 = cs.arc.start_angle, sw = cs.arc.sweep / opts.panels;
    for (int p = 0; p < opts.panels; ++p) {
      const quad::Rule q = quad::gauss_on(a0 + p * sw, a0 + (p + 1) * sw, opts.order);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec2 u = polar(1.0, q.nodes[i]);
        const Vec2 loc = Vec2{x0, 0.0} + u * cs.arc.radius;
        cs.outer_arc.points.push_back(frame.from_frame(loc));
        cs.outer_arc.normals.push_back(frame.from_frame(u) - frame.vertex);
        cs.outer_arc.weights.push_back(q.weights[i] * cs.arc.radius);
      }
    }
  }

  auto const_h = [h](double) { return h; };
  add_polar(cs.sector_d, frame, tm, tp, const_h, opts);
  add_polar(cs.sector_q, frame, -0.5 * b, 0.5 * b, const_h, opts);

  const double R = cs.arc.radius;
  auto to_arc = [x0, R](double theta) {
    const double c = std::cos(theta);
    return x0 * c + std::sqrt(x0 * x0 * c * c - x0 * x0 + R * R);
  };
  add_polar(cs.region_de, frame, tp, beta, const_h, opts);
  add_polar(cs.region_de, frame, -beta, tm, const_h, opts);
  // angular pieces behind the vertex, split so each stays a smooth polar patch
  add_polar(cs.region_de, frame, beta, 2.0 * kPi - beta, to_arc, opts);
  return cs;
}

Polygon parse_polygon(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Vec2> v;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) throw ConfigError("polygon line " + std::to_string(lineno) + ": expected 'x y'");
    std::string extra;
    if (ls >> extra) throw ConfigError("polygon line " + std::to_string(lineno) + ": trailing data");
    v.push_back({x, y});
  }
  return Polygon(std::move(v));
}

Polygon read_polygon(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open polygon file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_polygon(ss.str());
}

void write_polygon(const std::string& path, const Polygon& p) {
  std::ostringstream f;
  f.precision(17);
  for (const Vec2& v : p.vertices()) f << v.x << ' ' << v.y << '\n';
  io::atomic_write(path, f.str());
}

}  // namespace scatterlab::geometry
