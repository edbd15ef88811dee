#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scatterlab/common.hpp"
#include "scatterlab/experiments.hpp"
#include "scatterlab/forward.hpp"

namespace scatterlab::config {

inline const std::vector<std::string> kKinds = {"solve",      "farfield",     "eta",        "profile",
                                                "identity",   "stability",    "corner-bound", "smallness",
                                                "herglotz-blowup", "disk-eig"};

/// Polygon (vertices, or "polygon_file" resolved at parse time) or circle.
struct ScattererSpec {
  std::string shape = "polygon";
  std::vector<Vec2> vertices;
  Vec2 center{0, 0};
  double radius = 1;
  double gamma = 2;
  double q = 1;
  bool vacuum = false;  // gamma = q = 1 shortcut; the only way past the gamma != 1 gate

  forward::Scatterer build() const;
  bool operator==(const ScattererSpec&) const = default;
};

struct IncidentSpec {
  std::string kind = "plane";  // plane | herglotz
  double k = 1;
  double angle = 0;
  cplx amplitude{1, 0};
  std::vector<cplx> density;                 // herglotz samples, or
  std::vector<std::pair<int, cplx>> modes;   // trigonometric modes on `directions` samples
  int directions = 64;

  forward::IncidentField build() const;
  forward::IncidentField build(double angle_override) const;
  bool operator==(const IncidentSpec&) const = default;
};

struct BoundsSpec {
  double angle_min = 0.1;
  double angle_max = kPi - 0.1;
  double min_edge = 0.05;
  double radius = 10;
  double gamma_min = 0.01;
  double gamma_max = 100;
  double q_max = 100;

  forward::ScattererBounds build() const;
  bool operator==(const BoundsSpec&) const = default;
};

struct CornerSpec {  // eta, profile
  double gamma = 3;
  double opening = kPi / 2;
  int samples = 361;   // profile rows over [0, 2 pi)
  bool use_scatterer = false;  // eta: every vertex of scatterers[0] instead
  bool operator==(const CornerSpec&) const = default;
};

struct ContourSpec {
  int order = 10, panels = 2, grading = 5;
  geometry::ContourOptions build() const { return {order, panels, grading}; }
  bool operator==(const ContourSpec&) const = default;
};

struct IdentitySpec {
  int vertex = 0;
  double h = 0.3;
  double tau_factor = 2;  // tau = tau_factor * tau0
  ContourSpec contours;
  ContourSpec refined{12, 3, 7};
  double fit_r_lo = 0;  // 0: h / 30
  double fit_r_hi = 0;  // 0: h / 2
  bool operator==(const IdentitySpec&) const = default;
};

struct PerturbationSpec {
  std::string family = "translation";
  Vec2 direction{1, 0};
  int vertex = 0;
  std::vector<double> steps{0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
  experiments::PerturbationFamily build() const;
  bool operator==(const PerturbationSpec&) const = default;
};

struct SweepSpec {
  double radius = 0;  // R for S; 0: 1.05 * max radius
  std::vector<double> incidences{0, kPi / 2, kPi, 3 * kPi / 2};
  double k_threshold = 1e-3;
  double annulus_radius = 0;
  int annulus_nodes = 64;
  double hull_distance = 0.2;
  int hull_nodes = 64;
  bool operator==(const SweepSpec&) const = default;
};

struct BlowupConfig {
  int vertex = 0;
  double grid_spacing = 0.02;
  int directions = 64;
  std::vector<double> lambdas;  // empty: 1e-2 .. 1e-12
  std::vector<std::pair<int, cplx>> smooth_modes{{0, {1, 0}}, {1, {0.5, 0}}, {-2, {0.25, 0}}};
  bool operator==(const BlowupConfig&) const = default;
};

struct DiskEigSpec {
  double radius = 1, gamma = 1, q = 4;
  double k_lo = 0.1, k_hi = 6;
  int n_lo = 0, n_hi = 4;
  int samples = 10000;
  bool operator==(const DiskEigSpec&) const = default;
};

struct ExperimentConfig {
  std::string kind;
  std::vector<ScattererSpec> scatterers;
  IncidentSpec incident;
  forward::MeshOptions mesh;
  BoundsSpec bounds;
  int farfield_samples = 256;
  std::string output = "out";
  CornerSpec corner;
  IdentitySpec identity;
  PerturbationSpec perturbation;
  SweepSpec sweep;
  BlowupConfig blowup;
  DiskEigSpec disk_eig;

  bool operator==(const ExperimentConfig& o) const;
};

/// Every schema and admissibility violation found, in document order.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> v);
  const std::vector<std::string>& violations() const { return v_; }

 private:
  std::vector<std::string> v_;
};

/// `base_dir` resolves relative polygon_file entries. Throws ConfigErrors.
ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig parse_config(const std::string& path);

/// Requirements a kind puts on the rest of the config ("identity needs two
/// polygonal scatterers", ...). Empty when the config can run as `kind`.
std::vector<std::string> kind_violations(const ExperimentConfig& c, const std::string& kind);

/// Canonical JSON: every field written, defaults included, keys sorted.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace scatterlab::config
