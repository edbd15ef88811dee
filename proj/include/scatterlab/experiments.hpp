#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scatterlab/corner.hpp"
#include "scatterlab/forward.hpp"
#include "scatterlab/geometry.hpp"
#include "scatterlab/herglotz.hpp"

namespace scatterlab::experiments {

using forward::IncidentField;
using forward::MeshOptions;
using forward::Scatterer;
using forward::SolveOptions;
using geometry::Polygon;

/// Written in place of (ln ln(S/eps))^{-p} when S/eps <= e.
inline constexpr double kNoDelta = -1.0;

double delta_axis(double s, double eps, double power);

/// Rank correlation with average ranks for ties. NaN-free: 0 for constant input.
double spearman(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double slope = 0, intercept = 0;
  std::size_t points = 0;
};
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// ---- tables ---------------------------------------------------------------

struct SweepRecord {
  std::string id;
  std::vector<double> values;  // one per table column
  bool failed = false;
  std::string error;
};

struct SweepTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<SweepRecord> records;

  double at(std::size_t row, const std::string& column) const;
  std::vector<double> column(const std::string& name, bool skip_failed = true) const;
  /// "id,<columns>,failed" with %.17g numbers; failed rows keep their id and zeros.
  std::string csv() const;
};

// ---- floors ---------------------------------------------------------------

struct SolverFloor {
  double disk_error = 0;  // ||u_inf - series|| for a disk of comparable size
  double cauchy = 0;      // ||u_inf(ref) - u_inf(ref + 1)|| on the base scatterer
  double value = 0;       // max of the two
};

/// Calibrates the far-field error floor for `base` under the given mesh.
SolverFloor calibrate_floor(const Scatterer& base, const IncidentField& inc, const MeshOptions& mesh,
                            const SolveOptions& solve, std::size_t farfield_samples = 256);

// ---- corner coefficients ------------------------------------------------------

struct CornerCoefficient {
  std::size_t vertex = 0;
  double opening = 0;
  double eta = 0;
  cplx K{0, 0};
  double fit_residual = 0;
  bool low_confidence = false;
};

/// K at every convex vertex of a polygonal solution; window r in [r_hi / 20, r_hi]
/// with r_hi = window_fraction * (distance to the nearest non-adjacent edge,
/// capped by the adjacent edge lengths).
std::vector<CornerCoefficient> corner_coefficients(const forward::FieldSolution& sol,
                                                   double window_fraction = 0.25);

// ---- sweeps ----------------------------------------------------------------

struct PerturbationFamily {
  enum class Kind { translation, vertex_pull, dilation };
  Kind kind = Kind::translation;
  Vec2 direction{1, 0};     // translation direction (normalised internally)
  std::size_t vertex = 0;   // vertex_pull: moved outward from the centroid
  std::vector<double> steps;

  Polygon apply(const Polygon& p, double step) const;
  static Kind parse_kind(const std::string& s);
  static std::string kind_name(Kind k);
};

struct SweepOptions {
  MeshOptions mesh;
  SolveOptions solve;
  std::size_t farfield_samples = 256;
  double radius = 0;               // R for S = ||u^i||_{H2(B_2R)}; 0: 1.05 * max radius
  forward::ScattererBounds bounds; // admissibility gate for perturbed polygons
  int threads = 1;                 // sweep points in parallel
};

struct StabilityResult {
  SweepTable table;  // step, d_H, epsilon, S, K_m, delta
  SolverFloor floor;
  double s = 0;
  double eta_m = 0;
  double spearman = 0;  // d_H vs epsilon
  LinearFit fit;        // ln d_H = c + beta ln (ln ln(S/eps))^{-1}
  double beta = 0;
  bool uniqueness_ok = true;  // eps < 2 floor only when d_H < mesh resolution
  std::size_t failures = 0;
};

StabilityResult run_stability_sweep(const Scatterer& base, const PerturbationFamily& family,
                                    const IncidentField& inc, const SweepOptions& opts);

struct CornerBoundResult {
  SweepTable table;  // scatterer, incidence, farfield_norm, S, K_abs, eta, ratio, flagged
  SolverFloor floor;
  double min_ratio = 0;        // min ||u_inf|| / S over unflagged records
  double min_norm = 0;         // min ||u_inf|| over unflagged records
  std::size_t counted = 0;     // unflagged records
  std::size_t failures = 0;
};

/// incidences are angles; |K| below k_threshold flags a record as near-degenerate.
CornerBoundResult run_corner_bound_sweep(std::span<const Scatterer> scatterers,
                                         std::span<const double> incidences, double k,
                                         const SweepOptions& opts, double k_threshold = 1e-3);

struct SmallnessOptions {
  SweepOptions sweep;
  double annulus_radius = 0;        // 0: 1.5 * max radius
  int annulus_nodes = 64;
  double hull_distance = 0.2;       // second node set: offset curve of the hull
  int hull_nodes = 64;
};

struct SmallnessResult {
  SweepTable table;  // step, epsilon, sup_annulus, sup_hull, grad_sup_hull
  double spearman = 0;  // epsilon vs sup_annulus
  std::size_t failures = 0;
};

SmallnessResult run_smallness_probe(const Scatterer& base, const PerturbationFamily& family,
                                    const IncidentField& inc, const SmallnessOptions& opts);

struct BlowupSpec {
  Polygon domain{std::vector<Vec2>{{-0.5, -0.4}, {0.6, -0.3}, {0.0, 0.6}}};
  std::size_t vertex = 0;
  double gamma = 2;            // sets the exponent at the vertex
  double k = 1;
  double grid_spacing = 0.02;
  std::vector<std::pair<int, cplx>> smooth_modes{{0, {1, 0}}, {1, {0.5, 0}}, {-2, {0.25, 0}}};
  std::size_t directions = 64;  // M
  std::vector<double> lambdas;  // empty: 1e-2 .. 1e-12, one per decade
};

struct BlowupResult {
  std::vector<herglotz::BlowupRow> regular, singular;
  double eta = 0;
  double smooth_norm = 0;             // ||g|| of the normalised smooth density
  std::vector<double> matched_regular;  // regular ||g|| interpolated at each singular epsilon
  bool singular_dominates = true;
  bool regular_bounded = true;        // ||g_eps|| <= 2 ||g|| on the regular curve
  bool singular_monotone = true;      // ||g_eps|| non-decreasing as eps decreases
};

BlowupResult run_herglotz_blowup(const BlowupSpec& spec);

}  // namespace scatterlab::experiments
