#include <cmath>

#include "doctest.h"
#include "scatterlab/experiments.hpp"

using namespace scatterlab;
using namespace scatterlab::experiments;

namespace {
const Polygon kTri({{-0.5, -0.3}, {0.5, -0.3}, {0.0, 0.55}});
const auto kInc = IncidentField::plane_wave(1.0, 0.3);

std::size_t col(const SweepTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}
}  // namespace

TEST_CASE("statistics helpers") {
  CHECK(delta_axis(1.0, 0.5, 1.0) == kNoDelta);
  CHECK(delta_axis(1.0, 0.0, 1.0) == kNoDelta);
  CHECK(delta_axis(1.0, -1.0, 1.0) == kNoDelta);
  const double d = delta_axis(10.0, 1e-6, 0.8);
  CHECK(d == doctest::Approx(std::pow(std::log(std::log(1e7)), -0.8)));
  CHECK_FALSE(std::isnan(delta_axis(1.0, std::nan(""), 1.0)));

  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 9, 30}, z{5, 4, 3, 2, 1}, c{1, 1, 1, 1, 1};
  CHECK(spearman(x, y) == doctest::Approx(1.0));
  CHECK(spearman(x, z) == doctest::Approx(-1.0));
  CHECK(spearman(x, c) == 0.0);
  const std::vector<double> t{1, 2, 2, 3};
  const std::vector<double> u{1, 2, 3, 4};
  CHECK(spearman(t, u) == doctest::Approx(0.9486832980505138));  // average ranks 1, 2.5, 2.5, 4
  const auto f = least_squares(x, std::vector<double>{3, 5, 7, 9, 11});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
}

TEST_CASE("perturbation families") {
  PerturbationFamily fam;
  fam.direction = {3, 4};
  const auto p = fam.apply(kTri, 0.1);
  CHECK(p.vertex(0).x == doctest::Approx(kTri.vertex(0).x + 0.06));
  CHECK(geometry::hausdorff_distance(kTri, p) == doctest::Approx(0.1).epsilon(1e-12));
  fam.kind = PerturbationFamily::Kind::vertex_pull;
  fam.vertex = 2;
  CHECK(fam.apply(kTri, 0.1).vertex(2).y == doctest::Approx(0.65));
  fam.kind = PerturbationFamily::Kind::dilation;
  CHECK(fam.apply(kTri, 0.1).area() == doctest::Approx(kTri.area() * 1.21));
  CHECK(PerturbationFamily::parse_kind("vertex_pull") == PerturbationFamily::Kind::vertex_pull);
  CHECK_THROWS_AS(PerturbationFamily::parse_kind("shear"), ConfigError);
}

TEST_CASE("zero perturbation sits below the floor; table shape") {
  PerturbationFamily fam;
  fam.steps = {0.0, 0.05};
  const auto r = run_stability_sweep(Scatterer(kTri, 2.0, 1.0), fam, kInc, {});
  REQUIRE(r.table.records.size() == 2);
  const auto& z = r.table.records[0];
  CHECK_FALSE(z.failed);
  CHECK(z.values[col(r.table, "d_H")] == 0.0);
  CHECK(z.values[col(r.table, "epsilon")] < r.floor.value);
  CHECK(z.values[col(r.table, "delta")] == kNoDelta);
  CHECK(r.floor.value == std::max(r.floor.disk_error, r.floor.cauchy));
  CHECK(r.floor.value > 0);
  const std::string csv = r.table.csv();
  CHECK(csv.rfind("id,step,d_H,epsilon,S,K_m,delta,failed\n", 0) == 0);
  CHECK(csv.find("nan") == std::string::npos);
}

TEST_CASE("vertex pull: positive fitted exponent; sweeps are deterministic") {
  PerturbationFamily fam;
  fam.kind = PerturbationFamily::Kind::vertex_pull;
  fam.vertex = 2;
  for (int i = 1; i <= 8; ++i) fam.steps.push_back(0.025 * i);
  SweepOptions o;
  o.threads = 4;
  const auto r = run_stability_sweep(Scatterer(kTri, 2.0, 1.0), fam, kInc, o);
  CHECK(r.failures == 0);
  CHECK(r.beta > 0);
  CHECK(r.spearman > 0.9);
  CHECK(r.uniqueness_ok);
  o.threads = 1;
  const auto again = run_stability_sweep(Scatterer(kTri, 2.0, 1.0), fam, kInc, o);
  CHECK(again.table.csv() == r.table.csv());
  CHECK(again.beta == r.beta);
}

TEST_CASE("corner bound: ratio invariant under amplitude, vacuum flagged") {
  const Scatterer s(kTri, 2.0, 1.0);
  const auto u1 = forward::far_field(forward::solve_scattering(s, IncidentField::plane_wave(1.0, 0.3)), 128);
  const auto i10 = IncidentField::plane_wave(1.0, 0.3, 10.0);
  const auto u10 = forward::far_field(forward::solve_scattering(s, i10), 128);
  const double R = 1.05 * kTri.max_radius();
  CHECK(u10.l2_norm() / i10.amplitude_s(R) ==
        doctest::Approx(u1.l2_norm() / kInc.amplitude_s(R)).epsilon(1e-12));

  const std::vector<Scatterer> vac{Scatterer::vacuum(kTri)};
  const std::vector<double> dirs{0.0, kPi};
  const auto r = run_corner_bound_sweep(vac, dirs, 1.0, {});
  CHECK(r.counted == 0);
  for (const auto& rec : r.table.records) CHECK(rec.values[col(r.table, "flagged")] == 1.0);

  const std::vector<Scatterer> one{s};
  const auto ok = run_corner_bound_sweep(one, dirs, 1.0, {});
  CHECK(ok.counted == 2);
  CHECK(ok.min_norm >= 10 * ok.floor.value);
}

TEST_CASE("corner coefficients of a triangle") {
  const auto sol = forward::solve_scattering(Scatterer(kTri, 2.0, 1.0), kInc);
  const auto cc = corner_coefficients(sol);
  REQUIRE(cc.size() == 3);
  for (const auto& c : cc) {
    CHECK(c.eta == doctest::Approx(corner::singularity_exponent(2.0, c.opening)));
    CHECK(std::abs(c.K) > 0);
    CHECK_FALSE(c.low_confidence);
  }
}

TEST_CASE("smallness probe") {
  PerturbationFamily fam;
  fam.steps = {0.0, 0.01, 0.02, 0.04, 0.08, 0.16};
  SmallnessOptions o;
  const auto r = run_smallness_probe(Scatterer(kTri, 2.0, 1.0), fam, kInc, o);
  REQUIRE(r.table.records.size() == 6);
  CHECK(r.failures == 0);
  const auto& t = r.table;
  const auto& z = t.records[0].values;
  CHECK(z[col(t, "epsilon")] < 1e-8);
  CHECK(z[col(t, "sup_annulus")] < 1e-8);
  CHECK(r.spearman > 0.9);
  for (const auto& rec : t.records) CHECK(rec.values[col(t, "grad_sup_hull")] >= 0);
  const auto g = t.column("grad_sup_hull");
  CHECK(g.back() > g[1]);
}

TEST_CASE("Herglotz blow-up curves") {
  const auto b = run_herglotz_blowup({});
  CHECK(b.regular_bounded);
  CHECK(b.singular_monotone);
  CHECK(b.singular_dominates);
  REQUIRE(b.matched_regular.size() == b.singular.size());
  for (std::size_t i = 0; i < b.singular.size(); ++i) CHECK(b.singular[i].g_norm >= b.matched_regular[i]);
  CHECK(b.eta == doctest::Approx(corner::singularity_exponent(2.0, BlowupSpec{}.domain.interior_angle(0))));
}
