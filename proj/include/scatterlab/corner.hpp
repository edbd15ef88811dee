#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scatterlab/common.hpp"
#include "scatterlab/forward.hpp"
#include "scatterlab/geometry.hpp"

namespace scatterlab::corner {

using geometry::CornerFrame;

/// Smallest root in (0,1) of (sin e(pi-a) / sin e pi)^2 = ((g+1)/(g-1))^2.
/// Throws DomainError on bad input and SolverError when no root exists.
double singularity_exponent(double gamma, double a);
/// Same root before rounding to double (x87 extended on this target).
long double singularity_exponent_ext(double gamma, double a);

/// |(sin e(pi-a)/sin e pi)^2 - ((g+1)/(g-1))^2|, evaluated in long double.
double exponent_residual(double gamma, double a, long double eta);

/// Transmission mode type. In the local angle psi measured from the bisector
/// of the corner of D (interior |psi| <= a/2, exterior psi in [a/2, 2pi - a/2]):
///   symmetric:      cos(l psi)          inside,  B cos(l (psi - pi)) outside
///   antisymmetric:  sin(l psi)          inside,  B sin(l (psi - pi)) outside
enum class Parity { symmetric, antisymmetric };

struct ModeExponent {
  double lambda;
  Parity parity;
};

/// All local transmission exponents in (0, lambda_max), both parities, ascending.
std::vector<ModeExponent> transmission_exponents(double gamma, double a, double lambda_max);

/// Angular profile of r^l phi(theta). Interior amplitude is 1.
struct AngularProfile {
  double lambda = 0;
  double gamma = 1;
  double opening = 0;      // a
  double bisector = 0;     // frame angle of the bisector of D's corner
  Parity parity = Parity::symmetric;
  double exterior_amplitude = 0;  // B

  // In frame angles theta (the CornerFrame convention).
  double value(double theta) const;
  double derivative(double theta) const;  // one-sided: interior value at the edges
  double derivative_exterior(double theta) const;
  double local(double theta) const;       // psi in [-pi, pi)
  bool interior(double theta) const;
  /// Phases in cos(l psi + Phi): interior and exterior (exterior amplitude B).
  double interior_phase() const;
  double exterior_phase() const;
  /// Worst continuity and flux residuals over both edges.
  double continuity_residual() const;
  double flux_residual() const;
};

AngularProfile angular_profile(double gamma, double a, double lambda, Parity parity,
                               double bisector = 0.0);

/// Exponent + profile at a corner, plus the fitted coefficient.
struct SingularityData {
  CornerFrame frame;
  double gamma = 1;
  double eta = 0;
  AngularProfile profile;
  cplx K{0, 0};
  double fit_residual = 0;
  bool low_confidence = false;

  double theta_plus() const { return frame.theta_plus; }
  double theta_minus() const { return frame.theta_minus; }
  /// K r^eta phi(theta) and its gradient at global point x.
  cplx singular_value(Vec2 x) const;
  CVec2 singular_gradient(Vec2 x) const;
};

SingularityData make_singularity_data(const CornerFrame& frame, double gamma);

/// Bounds (eta_m, eta_M) of the exponent over a in [a_m, a_M] for fixed gamma.
std::pair<double, double> exponent_bounds(double gamma, double a_m, double a_M, int samples = 64);

using FieldEvaluator = std::function<std::vector<cplx>(std::span<const Vec2>)>;

struct FitWindow {
  double r_lo = 0;
  double r_hi = 0;
  int radii = 12;
  int angles = 48;
  double edge_margin = 0.05;  // radians kept away from the two edges of D
  double max_lambda = 3.0;    // higher transmission modes included in the basis
  int poly_degree = 5;        // global polynomials 1, x, y, x^2, ...; lower degrees leak smooth terms into K
};

struct KFit {
  cplx K{0, 0};
  double residual = 0;  // ||Ax - b|| / ||b - mean b||
  bool low_confidence = false;
  std::size_t samples = 0;
  std::size_t basis_size = 0;
};

/// Least-squares fit u ~ polynomials + K r^eta phi + higher modes on arcs.
/// Flags low confidence when the relative residual exceeds 0.1.
KFit extract_singularity_coefficient(const FieldEvaluator& field, const SingularityData& sd,
                                     const FitWindow& win);
KFit extract_singularity_coefficient(const forward::FieldSolution& sol, const SingularityData& sd,
                                     const FitWindow& win);

struct CGOParams {
  CornerFrame frame;
  double tau = 1;
  CVec2 rho() const;  // tau (-x_hat + i y_hat), global coordinates
};

struct CGOValue {
  cplx value;
  CVec2 gradient;
};

/// e^{rho.(x - x_c)}; RangeError when the exponent's real part exceeds 700.
CGOValue cgo_field(const CGOParams& p, Vec2 x);

/// |K| Gamma(eta) |phi'(theta+) e^{i a eta} - phi'(theta-)| tau^{-eta}
double corner_integral_closed_form(cplx K, const SingularityData& sd, double tau);
/// Complex value of the integral over both infinite rays (normals outward from D).
cplx corner_integral_value(cplx K, const SingularityData& sd, double tau);
/// |phi'(theta+) e^{i a eta} - phi'(theta-)| / sin(a eta); the inequality
/// with sin(a eta) holds iff this is >= 1.
double corner_lower_bound_ratio(const SingularityData& sd);

struct IdentityTerms {
  cplx i1, i2, i3, i4, i5, i6, i7, i8, i9;
};

struct IdentityReport {
  cplx lhs{0, 0};
  cplx rhs{0, 0};
  double residual = 0;
  double budget = 0;
  double quadrature_error = 0;
  double solver_error = 0;
  IdentityTerms terms;
  cplx extra_term{0, 0};  // k^2 int_{D~} u0 u' (absent from the uncorrected statement)
  double tau = 0, h = 0, eta = 0;
  cplx K{0, 0};
  bool degenerate_pair = false;
  bool degraded_accuracy = false;
  std::size_t near_boundary_nodes = 0;

  std::string to_json() const;
};

struct IdentityOptions {
  geometry::ContourOptions refined{12, 3, 7};  // second contour set for the quadrature estimate
  int threads = 1;
};

/// Evaluates both sides of the corner integral identity at the vertex of cs.
/// sol is the solution for D (the corner owner), sol2 the one for D'.
IdentityReport verify_integral_identity(const forward::FieldSolution& sol,
                                        const forward::FieldSolution& sol2,
                                        const geometry::ContourSet& cs, const CGOParams& p,
                                        const SingularityData& sd, const IdentityOptions& opts = {});

}  // namespace scatterlab::corner
