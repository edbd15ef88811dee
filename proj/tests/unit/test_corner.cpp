#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "json.hpp"
#include "scatterlab/corner.hpp"
#include "scatterlab/forward.hpp"

using namespace scatterlab;
using namespace scatterlab::corner;
using forward::IncidentField;
using forward::Scatterer;
using geometry::Polygon;

namespace {

const Polygon kD({{0, 0}, {1, 0.2}, {0.3, 1}});

SingularityData data_at(const Polygon& d, std::size_t v, double gamma) {
  return make_singularity_data(geometry::corner_frame(d, d, d.vertex(v)), gamma);
}

struct IdentitySetup {
  Polygon D{{{-1.2, -0.4}, {-0.2, -0.5}, {-0.6, 0.5}}};
  Polygon D2{{{0.4, -0.3}, {1.2, -0.1}, {0.6, 0.6}}};
  Polygon Q = [this] {
    std::vector<Vec2> all = D.vertices();
    all.insert(all.end(), D2.vertices().begin(), D2.vertices().end());
    return geometry::convex_hull(all);
  }();
  geometry::CornerFrame fr = geometry::corner_frame(Q, D, D.vertex(0));
  double h = 0.3;
  forward::FieldSolution s1 = forward::solve_scattering(Scatterer(D, 2.0, 1.0), IncidentField::plane_wave(1.0, 0.4));
  forward::FieldSolution s2 = forward::solve_scattering(Scatterer(D2, 2.0, 1.0), IncidentField::plane_wave(1.0, 0.4));
  SingularityData sd = [this] {
    auto d = make_singularity_data(fr, 2.0);
    FitWindow w;
    w.r_lo = h / 30;
    w.r_hi = h / 2;
    d.K = extract_singularity_coefficient(s1, d, w).K;
    return d;
  }();

  IdentityReport at(double tau) const {
    const auto cs = geometry::build_contours(fr, D, Q, h, tau, {}, &D2);
    return verify_integral_identity(s1, s2, cs, {fr, tau}, sd);
  }
};

}  // namespace

TEST_CASE("exponent: symmetry, closed form, bounds and errors") {
  CHECK(std::abs(singularity_exponent(3, 2 * kPi / 5) - singularity_exponent(1.0 / 3, 2 * kPi / 5)) < 1e-13);
  CHECK(std::abs(singularity_exponent(3, kPi / 2) - 2 / kPi * std::acos(0.25)) < 1e-12);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (double g : {0.2, 0.7, 1.5, 4.0}) {
    const double am = 0.3, aM = kPi - 0.3;
    const auto [lo, hi] = exponent_bounds(g, am, aM);
    CHECK(0 < lo);
    CHECK(hi < 1);
    for (int i = 0; i < 20; ++i) {
      const double a = am + (aM - am) * u(rng);
      const long double e = singularity_exponent_ext(g, a);
      CHECK(exponent_residual(g, a, e) < 1e-12);
      CHECK(double(e) >= lo - 1e-12);
      CHECK(double(e) <= hi + 1e-12);
    }
  }
  const auto modes = transmission_exponents(2.0, 1.0, 3.0);
  REQUIRE(!modes.empty());
  CHECK(modes.front().lambda == doctest::Approx(singularity_exponent(2.0, 1.0)).epsilon(1e-12));
  for (std::size_t i = 1; i < modes.size(); ++i) CHECK(modes[i - 1].lambda <= modes[i].lambda);
  CHECK_THROWS_AS(singularity_exponent(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(singularity_exponent(-2.0, 1.0), DomainError);
  CHECK_THROWS_AS(singularity_exponent(2.0, kPi), DomainError);
  CHECK_THROWS_AS(singularity_exponent(2.0, 0.0), DomainError);
}

TEST_CASE("angular profile: matching conditions and harmonicity") {
  for (double g : {0.3, 2.0, 7.0}) {
    const auto sd = data_at(kD, 0, g);
    CHECK(sd.profile.continuity_residual() < 1e-12);
    CHECK(sd.profile.flux_residual() < 1e-10);
    const auto& p = sd.profile;
    for (double th : {sd.theta_plus(), sd.theta_minus()}) {
      CHECK(std::abs(g * p.derivative(th) - p.derivative_exterior(th)) < 1e-10);
    }
  }
  auto sd = data_at(kD, 0, 2.0);
  sd.K = 1.0;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  int n = 0;
  double worst = 0;
  while (n < 100) {
    const double r = 0.05 + 0.5 * u(rng), th = 2 * kPi * u(rng);
    const double margin = 0.05;
    auto off_edge = [&](double e) { return std::abs(std::remainder(th - e, 2 * kPi)) > margin; };
    if (!off_edge(sd.theta_plus()) || !off_edge(sd.theta_minus())) continue;
    const Vec2 x = sd.frame.from_frame(polar(r, th));
    const double d = 2e-4 * r;
    const cplx lap = (sd.singular_value(x + Vec2{d, 0}) + sd.singular_value(x - Vec2{d, 0}) +
                      sd.singular_value(x + Vec2{0, d}) + sd.singular_value(x - Vec2{0, d}) -
                      4.0 * sd.singular_value(x)) / (d * d);
    worst = std::max(worst, std::abs(lap) / std::pow(r, sd.eta - 2));
    ++n;
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("coefficient extraction") {
  auto sd = data_at(kD, 0, 2.0);
  sd.K = 2.5;
  const FieldEvaluator f = [&](std::span<const Vec2> pts) {
    std::vector<cplx> v;
    for (const Vec2& x : pts) v.push_back(sd.singular_value(x) + 1.0 + 0.3 * x.x);
    return v;
  };
  FitWindow w;
  w.r_lo = 0.01;
  w.r_hi = 0.2;
  const auto kf = extract_singularity_coefficient(f, sd, w);
  CHECK(std::abs(kf.K - 2.5) / 2.5 < 1e-3);
  CHECK_FALSE(kf.low_confidence);

  const auto inc = IncidentField::plane_wave(1.0, 0.3);
  const auto vac = forward::solve_scattering(Scatterer::vacuum(kD), inc);
  const double S = inc.amplitude_s(1.05 * kD.max_radius());
  CHECK(std::abs(extract_singularity_coefficient(vac, sd, w).K) < 1e-6 * S);

  // noise-only field: the fit must flag itself rather than invent K
  std::mt19937 rng(8);
  std::normal_distribution<double> nd;
  const FieldEvaluator noise = [&](std::span<const Vec2> pts) {
    std::vector<cplx> v;
    for (std::size_t i = 0; i < pts.size(); ++i) v.push_back({nd(rng), nd(rng)});
    return v;
  };
  CHECK(extract_singularity_coefficient(noise, sd, w).low_confidence);
  w.r_hi = w.r_lo;
  CHECK_THROWS_AS(extract_singularity_coefficient(f, sd, w), DomainError);
}

TEST_CASE("CGO field") {
  const auto fr = geometry::corner_frame(kD, kD, kD.vertex(0));
  const double tau = 7.0;
  const CGOParams p{fr, tau};
  const CVec2 rho = p.rho();
  CHECK(std::abs(rho.x * rho.x + rho.y * rho.y) < 1e-12 * tau * tau);
  CHECK(std::sqrt(std::norm(rho.x) + std::norm(rho.y)) == doctest::Approx(tau * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(cgo_field(p, fr.vertex).value - 1.0) < 1e-15);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const double half = 0.5 * fr.hull_opening;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double r = 2 * u(rng), th = -half + 2 * half * u(rng);
    const Vec2 x = fr.from_frame(polar(r, th));
    if (std::abs(cgo_field(p, x).value) > std::exp(-fr.alpha_prime * tau * r) * (1 + 1e-12)) ++bad;
  }
  CHECK(bad == 0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 x = fr.vertex + Vec2{u(rng) - 0.5, u(rng) - 0.5};
    const double d = 1e-4;
    const cplx c = cgo_field(p, x).value;
    const cplx lap = (cgo_field(p, x + Vec2{d, 0}).value + cgo_field(p, x - Vec2{d, 0}).value +
                      cgo_field(p, x + Vec2{0, d}).value + cgo_field(p, x - Vec2{0, d}).value - 4.0 * c) / (d * d);
    worst = std::max(worst, std::abs(lap) / (tau * tau * std::abs(c)));
    const auto g = cgo_field(p, x).gradient;
    CHECK(std::abs(g.x - rho.x * c) < 1e-12 * std::abs(c) * tau);
  }
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(cgo_field(CGOParams{fr, 1e4}, fr.from_frame({-1, 0})), RangeError);
}

TEST_CASE("closed-form corner integral") {
  auto sd = data_at(kD, 0, 2.0);
  CHECK(corner_integral_closed_form(0.0, sd, 3.0) == 0.0);
  const cplx K{0.4, 1.1};
  for (double tau : {1.0, 5.0, 40.0}) {
    const double r = corner_integral_closed_form(K, sd, 2 * tau) / corner_integral_closed_form(K, sd, tau);
    CHECK(std::abs(r - std::pow(2.0, -sd.eta)) < 1e-14);
    CHECK(std::abs(corner_integral_value(K, sd, tau)) ==
          doctest::Approx(corner_integral_closed_form(K, sd, tau)).epsilon(1e-13));
  }
  CHECK(corner_lower_bound_ratio(sd) > 0);
}

TEST_CASE("integral identity: boundary-arc term decays in tau and JSON shape") {
  const IdentitySetup s;
  const double t0 = geometry::contour_tau0(s.h, s.fr.hull_opening);
  double prev = 1e300;
  for (double m : {2.0, 4.0, 8.0}) {
    const auto rep = s.at(m * t0);
    CHECK(std::abs(rep.terms.i2) < prev);
    prev = std::abs(rep.terms.i2);
    CHECK(rep.residual <= 10 * rep.budget);
  }
  const auto rep = s.at(2 * t0);
  const auto j = nlohmann::json::parse(rep.to_json());
  for (const char* key : {"lhs", "rhs", "residual", "budget", "terms", "tau", "h", "eta", "K"}) CHECK(j.contains(key));
  for (int i = 1; i <= 9; ++i) CHECK(j["terms"].contains("I" + std::to_string(i)));
  CHECK(j["lhs"].contains("re"));
  CHECK(j["tau"].get<double>() == doctest::Approx(2 * t0));
  CHECK(j["residual"].get<double>() == rep.residual);
}
