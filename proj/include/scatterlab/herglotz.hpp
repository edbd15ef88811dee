#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scatterlab/common.hpp"
#include "scatterlab/corner.hpp"
#include "scatterlab/forward.hpp"
#include "scatterlab/geometry.hpp"

namespace scatterlab::herglotz {

/// g sampled at d_j = (cos t_j, sin t_j), t_j = 2 pi j / M. M even, >= 32.
class HerglotzDensity {
 public:
  explicit HerglotzDensity(std::vector<cplx> values);
  static HerglotzDensity zero(std::size_t m);
  /// sum_n c_n e^{i n t} sampled on M directions.
  static HerglotzDensity trigonometric(std::size_t m, std::span<const std::pair<int, cplx>> modes);

  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  double angle(std::size_t j) const { return 2.0 * kPi * j / values_.size(); }
  double l2_norm() const;  // trapezoid rule on the circle

 private:
  std::vector<cplx> values_;
};

/// sum_j (2 pi / M) g_j e^{i k x.d_j}
std::vector<cplx> herglotz_wave(const HerglotzDensity& g, double k, std::span<const Vec2> points);
cplx herglotz_wave(const HerglotzDensity& g, double k, Vec2 x);

/// Regular grid clipped to a polygon: node (i, j) sits at origin + h (i, j).
struct GridSamples {
  Vec2 origin;
  double spacing = 0;
  int nx = 0, ny = 0;
  std::vector<char> mask;  // nx * ny, row-major in j
  std::vector<cplx> values;  // same layout; ignored outside the mask

  static GridSamples on_polygon(const geometry::Polygon& d, double spacing);
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Vec2 point(int i, int j) const { return origin + Vec2{i * spacing, j * spacing}; }
  std::vector<Vec2> masked_points() const;
  std::size_t masked_count() const;
  /// Fills values at masked nodes from f.
  void sample(const std::function<cplx(Vec2)>& f);
  void sample(const std::function<std::vector<cplx>(std::span<const Vec2>)>& f);
  /// Discrete H1 surrogate: h^2 sum |v|^2 + h^2 sum |forward differences / h|^2
  /// over pairs with both ends in the mask.
  double h1_norm() const;
};

struct HerglotzFit {
  HerglotzDensity density;
  double epsilon = 0;  // achieved discrete-H1 misfit
  double g_norm = 0;
  double lambda = 0;
  bool achieved = true;
};

/// Tikhonov fit min ||v_g - target||_H1^2 + lambda ||g||^2 over M-point densities.
/// One SVD serves a whole lambda sweep.
class HerglotzFitter {
 public:
  HerglotzFitter(const GridSamples& target, double k, std::size_t m);
  /// requested_eps > 0 sets the not-achieved flag when the misfit stays above it.
  HerglotzFit fit(double lambda, double requested_eps = 0) const;
  double target_norm() const { return target_norm_; }

 private:
  std::size_t m_;
  Eigen::MatrixXcd u_;
  Eigen::VectorXd s_;
  Eigen::MatrixXcd v_;
  Eigen::VectorXcd ub_;    // U^* b
  double residual_perp_;   // part of b outside range(A)
  double target_norm_;
};

HerglotzFit herglotz_density_fit(const GridSamples& target, double k, double lambda,
                                 std::size_t m = 64, double requested_eps = 0);

// ---- disk interior transmission eigenvalues --------------------------------

struct EigenPair {
  double k = 0;
  int mode = 0;
  double radius = 1, gamma = 1, q = 1;
  double determinant = 0;  // value at k
  double local_scale = 0;  // max |det| over the bracketing interval
};

/// gamma k1 J_n'(k1 r) J_n(k r) - k J_n(k1 r) J_n'(k r), k1 = k sqrt(q / gamma)
double disk_transmission_determinant(int n, double k, double radius, double gamma, double q);

/// Roots in [k_lo, k_hi] for modes n_lo..n_hi, found by sign changes on
/// `samples` uniform points and bisection. Sorted by (mode, k).
std::vector<EigenPair> disk_transmission_eigenvalues(double radius, double gamma, double q,
                                                     double k_lo, double k_hi, int n_lo, int n_hi,
                                                     int samples = 2000);

// ---- Hoelder quotient at a corner ------------------------------------------

struct HolderSchedule {
  double scale0 = 0.1;  // first scale s
  double ratio = 0.5;   // s_{m+1} = ratio * s_m
  int count = 8;
  int angles = 5;       // interior directions per scale
};

struct HolderRow {
  double scale = 0;
  double quotient = 0;  // max |u(x) - u(x')| / |x - x'|^eta over the pairs
};

struct HolderTable {
  std::vector<HolderRow> rows;
  double slope = 0;  // least-squares slope of log quotient vs log scale
  bool degraded_accuracy = false;
};

HolderTable holder_quotient_probe(const corner::FieldEvaluator& f, const geometry::CornerFrame& frame,
                                  double eta, const HolderSchedule& sched);
HolderTable holder_quotient_probe(const forward::FieldSolution& sol,
                                  const geometry::CornerFrame& frame, double eta,
                                  const HolderSchedule& sched);

// ---- files ----------------------------------------------------------------

void write_density_csv(const std::string& path, const HerglotzDensity& g);
HerglotzDensity read_density_csv(const std::string& path);

struct BlowupRow {
  double lambda, epsilon, g_norm;
};
void write_blowup_csv(const std::string& path, std::span<const BlowupRow> rows);

}  // namespace scatterlab::herglotz
