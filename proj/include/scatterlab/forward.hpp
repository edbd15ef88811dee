#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scatterlab/common.hpp"
#include "scatterlab/geometry.hpp"

namespace scatterlab::forward {

using geometry::Polygon;

// Smooth test shape; polygons are the physical scatterers, the circle exists
// for validation against the separation-of-variables series.
struct Circle {
  Vec2 center;
  double radius = 1.0;
};

using Shape = std::variant<Polygon, Circle>;

bool shape_contains(const Shape& s, Vec2 p);  // strict interior test, no tolerance
double shape_boundary_distance(const Shape& s, Vec2 p);
double shape_radius(const Shape& s);           // max |x| over the boundary

/// Penetrable medium D with constant contrasts: sigma = gamma inside, q inside.
/// gamma = 1 is accepted only together with q = 1 (vacuum shortcut).
class Scatterer {
 public:
  Scatterer(Shape shape, double gamma, double q);
  static Scatterer vacuum(Shape shape) { return Scatterer(std::move(shape), 1.0, 1.0); }

  const Shape& shape() const { return shape_; }
  const Polygon* polygon() const { return std::get_if<Polygon>(&shape_); }
  double gamma() const { return gamma_; }
  double q() const { return q_; }
  bool is_vacuum() const { return gamma_ == 1.0 && q_ == 1.0; }
  double interior_wavenumber(double k) const { return k * std::sqrt(q_ / gamma_); }

 private:
  Shape shape_;
  double gamma_;
  double q_;
};

struct ScattererBounds {
  geometry::PolygonBounds polygon;
  double gamma_min = 0.0;
  double gamma_max = 1e300;
  double q_max = 1e300;
};

/// Named admissibility violations; empty when admissible.
std::vector<std::string> scatterer_violations(const Scatterer& s, const ScattererBounds& b);

struct PlaneWave {
  Vec2 direction;  // unit
  cplx amplitude{1.0, 0.0};
};

/// Entire Helmholtz solution given as a finite superposition of plane waves.
/// Herglotz fields are stored through their trapezoid-rule plane-wave sum.
class IncidentField {
 public:
  enum class Kind { plane, herglotz, superposition };

  IncidentField(double k, std::vector<PlaneWave> waves, Kind kind = Kind::superposition);
  static IncidentField plane_wave(double k, double angle, cplx amplitude = 1.0);
  // density sampled at theta_j = 2*pi*j/M
  static IncidentField herglotz(double k, std::span<const cplx> density);

  double wavenumber() const { return k_; }
  Kind kind() const { return kind_; }
  const std::vector<PlaneWave>& waves() const { return waves_; }

  cplx value(Vec2 x) const;
  CVec2 gradient(Vec2 x) const;
  // d^2 u / dx_i dx_j in order (xx, xy, yy)
  std::array<cplx, 3> hessian(Vec2 x) const;

  IncidentField scaled(cplx s) const;
  IncidentField operator+(const IncidentField& o) const;

  /// H^2(B_{2R}) norm computed by polar Gauss quadrature of |u|^2 + |grad u|^2
  /// + |Hessian|^2 over the disk of radius 2R.
  double amplitude_s(double R) const;

 private:
  double k_;
  std::vector<PlaneWave> waves_;
  Kind kind_;
};

struct MeshOptions {
  int order = 16;                     // Gauss nodes per panel
  double nodes_per_wavelength = 10;   // upper bound on panel size
  int min_panels = 4;                 // per half edge (polygon) or total (circle)
  double grading_exponent = 3.0;      // p_g: breakpoints (L/2)(j/M)^p_g toward corners
  int refinement = 0;                 // each level doubles the panel count
};

/// Straight segment or circular arc, parametrized on t in [-1, 1] at constant speed.
struct Panel {
  bool arc = false;
  Vec2 a, b;           // segment end points (arc: end points as well)
  Vec2 center;         // arc only
  double radius = 0;   // arc only
  double t0 = 0, t1 = 0;  // arc angles
  int edge = -1;       // polygon edge index, -1 for smooth curves
  double length = 0;

  Vec2 point(double t) const;
  Vec2 normal(double t) const;  // outward unit normal
  double speed() const { return 0.5 * length; }
  double distance_to(Vec2 p) const;
  double closest_param(Vec2 p) const;  // parameter of the nearest panel point
};

class BoundaryMesh {
 public:
  BoundaryMesh(Shape shape, double k_max, const MeshOptions& opts);

  const Shape& shape() const { return shape_; }
  const MeshOptions& options() const { return opts_; }
  int order() const { return opts_.order; }
  const std::vector<Panel>& panels() const { return panels_; }
  std::size_t node_count() const { return points_.size(); }
  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<Vec2>& normals() const { return normals_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t panel_of(std::size_t node) const { return node / opts_.order; }
  double min_panel_length() const;
  // Number of nodes on polygon edge e.
  std::size_t nodes_on_edge(int e) const;

 private:
  Shape shape_;
  MeshOptions opts_;
  std::vector<Panel> panels_;
  std::vector<Vec2> points_, normals_;
  std::vector<double> weights_;
};

struct SolveOptions {
  int threads = 1;
  double rcond_floor = 1e-14;  // below this the system is reported as near-singular
};

struct SolverDiagnostics {
  std::size_t unknowns = 0;
  double condition_estimate = 0;  // 1 / rcond of the LU factorization
  double residual = 0;            // relative 2-norm residual of the linear solve
  double wall_seconds = 0;
};

/// Boundary traces of the total field on the mesh nodes:
/// trace_u = u, trace_dn = exterior normal derivative = gamma * interior one.
struct FieldSolution {
  Scatterer scatterer;
  IncidentField incident;
  std::shared_ptr<const BoundaryMesh> mesh;
  Eigen::VectorXcd trace_u;
  Eigen::VectorXcd trace_dn;
  SolverDiagnostics diagnostics;

  double wavenumber() const { return incident.wavenumber(); }
  double interior_wavenumber() const { return scatterer.interior_wavenumber(wavenumber()); }
  cplx interior_dn(std::size_t node) const { return trace_dn[node] / scatterer.gamma(); }
};

FieldSolution solve_scattering(const Scatterer& s, const IncidentField& inc,
                               std::shared_ptr<const BoundaryMesh> mesh,
                               const SolveOptions& opts = {});

/// Convenience overload that builds the mesh for the scatterer and wavenumber.
FieldSolution solve_scattering(const Scatterer& s, const IncidentField& inc,
                               const MeshOptions& mopts = {}, const SolveOptions& opts = {});

/// One factorization, several incident fields (all with the same k).
std::vector<FieldSolution> solve_scattering_many(const Scatterer& s,
                                                 std::span<const IncidentField> incs,
                                                 std::shared_ptr<const BoundaryMesh> mesh,
                                                 const SolveOptions& opts = {});

std::shared_ptr<const BoundaryMesh> make_mesh(const Scatterer& s, double k, const MeshOptions& mopts);

struct FieldSample {
  cplx value;
  CVec2 gradient;
  bool inside = false;
  bool near_boundary = false;  // closer than one local panel length: accuracy not guaranteed
};

std::vector<FieldSample> evaluate_field(const FieldSolution& sol, std::span<const Vec2> points,
                                       int threads = 1);

/// Representation of the opposite side: exterior formula inside D, interior
/// formula outside. Zero for exact traces; its size is an a-posteriori
/// estimate of the local field error.
std::vector<FieldSample> null_field(const FieldSolution& sol, std::span<const Vec2> points,
                                    int threads = 1);

/// Scattered field only (total minus incident) outside D.
std::vector<cplx> scattered_field(const FieldSolution& sol, std::span<const Vec2> points);

/// Samples of the far-field pattern on theta_j = 2*pi*j/N, with the
/// normalisation u^s(x) ~ e^{ik|x|} |x|^{-1/2} u_inf(x/|x|).
struct FarFieldPattern {
  double k = 0;
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  double angle(std::size_t j) const { return 2.0 * kPi * j / values.size(); }
  double l2_norm() const;
  /// Trigonometric interpolation at an arbitrary angle.
  cplx interpolate(double theta) const;
  FarFieldPattern resampled(std::size_t n) const;
};

FarFieldPattern far_field(const FieldSolution& sol, std::size_t n = 256);

/// Trapezoid-rule L2 distance; patterns with different N are resampled to
/// the larger N. Throws ContractViolation on mismatched k.
double farfield_l2_distance(const FarFieldPattern& p, const FarFieldPattern& q);

void write_farfield_csv(const std::string& path, const FarFieldPattern& p);
FarFieldPattern read_farfield_csv(const std::string& path, double k);

/// Separation-of-variables solution for a penetrable disk centred at the
/// origin and a unit plane wave.
class DiskSeries {
 public:
  DiskSeries(double radius, double gamma, double q, double k, double incidence_angle,
             int max_order = -1);

  cplx total_field(Vec2 x) const;
  cplx scattered_field(Vec2 x) const;  // outside only
  cplx far_field(double theta) const;
  FarFieldPattern far_field_pattern(std::size_t n) const;
  /// Exterior normal derivative of the total field on r = radius.
  cplx boundary_dn(double theta) const;
  int max_order() const { return nmax_; }

 private:
  double radius_, gamma_, k_, k1_, alpha_;
  int nmax_;
  std::vector<cplx> a_, b_;  // interior and scattered coefficients, index n + nmax
};

}  // namespace scatterlab::forward
