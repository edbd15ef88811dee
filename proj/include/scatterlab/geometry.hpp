#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scatterlab/common.hpp"

namespace scatterlab::geometry {

/// Simple polygon with counterclockwise vertices. Clockwise input is reversed
/// on construction; self-intersecting or degenerate input is rejected.
class Polygon {
 public:
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  Vec2 next(std::size_t i) const { return vertex(i + 1); }
  Vec2 prev(std::size_t i) const { return vertex(i + vertices_.size() - 1); }

  double edge_length(std::size_t i) const { return distance(vertex(i), next(i)); }
  double min_edge_length() const;
  // Interior opening angle at vertex i, in (0, 2*pi).
  double interior_angle(std::size_t i) const;
  bool is_convex() const;
  double area() const;
  double max_radius() const;  // max |v| over vertices
  Vec2 centroid() const;

  // Closed-region membership with tolerance kGeomTol.
  bool contains(Vec2 p) const;
  double boundary_distance(Vec2 p) const;
  // Distance from p to the closed region (0 inside).
  double region_distance(Vec2 p) const;
  std::optional<std::size_t> find_vertex(Vec2 p, double tol = kGeomTol) const;

  Polygon translated(Vec2 t) const;

 private:
  std::vector<Vec2> vertices_;
};

double segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Admissibility bounds of the scatterer class; geometry-only part.
struct PolygonBounds {
  double angle_min = 0.0;       // a_m
  double angle_max = kPi;       // a_M
  double min_edge = 0.0;        // l
  double radius = 1e300;        // R, polygon must lie strictly inside B_R
};

/// Named violations ("angle below a_m", ...). Empty when admissible.
std::vector<std::string> polygon_violations(const Polygon& p, const PolygonBounds& b);

Polygon convex_hull(std::span<const Vec2> points);

/// Exact Hausdorff distance between two convex polygons (closed regions).
double hausdorff_distance(const Polygon& a, const Polygon& b);

/// Vertex of `a` realizing the directed distance sup_{x in a} dist(x, b).
std::size_t farthest_vertex(const Polygon& a, const Polygon& b);

/// Local frame at a hull vertex. Angles are measured from x_hat toward y_hat.
struct CornerFrame {
  Vec2 vertex;
  Vec2 x_hat;           // bisector of the hull corner, pointing into Q
  Vec2 y_hat;           // x_hat rotated counterclockwise
  double opening = 0;   // a: interior angle of D at the vertex
  double hull_opening = 0;  // b: interior angle of Q at the vertex
  double alpha_prime = 0;   // cos((pi + b) / 4)
  double theta_minus = 0;   // frame angle of the D edge toward the next vertex
  double theta_plus = 0;    // frame angle of the D edge toward the previous vertex

  Vec2 to_frame(Vec2 p) const;      // global -> local (x_hat, y_hat) coordinates
  Vec2 from_frame(Vec2 q) const;    // local -> global
  double frame_angle(Vec2 p) const; // polar angle of p - vertex in the frame
};

CornerFrame corner_frame(const Polygon& hull, const Polygon& d, Vec2 vertex);

struct CurveQuadrature {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> weights;  // include the arclength element
  std::size_t size() const { return points.size(); }
  double length() const;
};

struct AreaQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
  double area() const;
};

/// Circle through the three points that define the exterior arc, in frame
/// coordinates: centre (center_x, 0), radius `radius`.
struct ExteriorArc {
  double center_x = 0;
  double radius = 0;
  double start_angle = 0;  // circle-centred angle at (h, (pi+b)/4)
  double sweep = 0;        // positive sweep through (-1/tau, 0)
};

/// Quadrature-equipped contours around a hull vertex.
/// Normals: Gamma+- carry the outward normal of D; the arcs carry the outward
/// normal of the region they enclose.
struct ContourSet {
  double h = 0;
  double tau = 0;
  double tau0 = 0;
  CornerFrame frame;
  ExteriorArc arc;
  CurveQuadrature gamma_plus;    // D edge at theta_plus, r in (0, h)
  CurveQuadrature gamma_minus;   // D edge at theta_minus
  CurveQuadrature inner_arc_d;   // r = h, theta in [theta_minus, theta_plus]
  CurveQuadrature inner_arc_q;   // r = h, |theta| <= (pi + b)/4 (includes inner_arc_d)
  CurveQuadrature outer_arc;     // exterior circular arc
  AreaQuadrature sector_d;       // B(x_c, h) intersected with D
  AreaQuadrature sector_q;       // B(x_c, h) intersected with Q
  AreaQuadrature region_de;      // complement of sector_d inside the closed contour
};

double contour_tau0(double h, double hull_opening);

struct ContourOptions {
  int order = 10;       // Gauss points per panel
  int panels = 2;       // panels per arc piece / angular interval
  int grading = 5;      // geometric levels toward the vertex
};

/// Builds the contour set. Throws DomainError when tau < tau0 and
/// ContractViolation when the disk B(x_c, h) meets `other` or is not cut by D
/// in a single sector.
ContourSet build_contours(const CornerFrame& frame, const Polygon& d, const Polygon& hull, double h,
                          double tau, const ContourOptions& opts = {},
                          const Polygon* other = nullptr);

/// Polygon file: one "x y" pair per line, '#' comments allowed.
Polygon read_polygon(const std::string& path);
Polygon parse_polygon(const std::string& text);
void write_polygon(const std::string& path, const Polygon& p);

}  // namespace scatterlab::geometry
