#include <filesystem>
#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "scatterlab/forward.hpp"

using namespace scatterlab;
using namespace scatterlab::forward;

namespace {

const Polygon kTri({{-0.5, -0.3}, {0.5, -0.3}, {0.0, 0.55}});
const Polygon kEquilateral({{0, 0}, {1, 0}, {0.5, 0.8660254037844386}});

double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("vacuum shortcut reproduces the incident field") {
  const auto inc = IncidentField::plane_wave(1.3, 0.4);
  const auto sol = solve_scattering(Scatterer::vacuum(kTri), inc);
  const auto& m = *sol.mesh;
  double e = 0;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const CVec2 g = inc.gradient(m.points()[i]);
    e = std::max(e, std::abs(sol.trace_u[i] - inc.value(m.points()[i])));
    e = std::max(e, std::abs(sol.trace_dn[i] - (g.x * m.normals()[i].x + g.y * m.normals()[i].y)));
  }
  CHECK(e < 1e-12);
  const std::vector<Vec2> pts{{0, 0}, {2, 1}, {-3, 0.5}};
  const auto f = evaluate_field(sol, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(f[i].value - inc.value(pts[i])) < 1e-12);
  const auto ff = far_field(sol, 64);
  CHECK(max_abs(ff.values) == 0.0);
}

TEST_CASE("contrast gamma = 1 needs q = 1") {
  CHECK_THROWS_AS(Scatterer(kTri, 1.0, 2.0), DomainError);
  CHECK_NOTHROW(Scatterer(kTri, 1.0, 1.0));
  CHECK_THROWS(Scatterer(kTri, 0.0, 1.0));
  ScattererBounds b;
  b.gamma_min = 0.5;
  b.gamma_max = 4;
  const auto v = scatterer_violations(Scatterer(kTri, 8.0, 1.0), b);
  CHECK(v.size() == 1);
}

TEST_CASE("disk traces, interior values and far field against the series") {
  const double g = 2, q = 1, k = 1, al = 0.0;
  const oracle::DiskSeries ref(1.0, g, q, k, al);
  const auto sol = solve_scattering(Scatterer(Circle{{0, 0}, 1.0}, g, q), IncidentField::plane_wave(k, al));
  CHECK(sol.diagnostics.residual < 1e-10);
  const auto& m = *sol.mesh;
  double eu = 0, edn = 0, jump = 0;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const double th = m.points()[i].angle();
    const auto ext = ref.total(1.0, th, +1);
    const auto in = ref.total(1.0, th, -1);
    eu = std::max(eu, std::abs(sol.trace_u[i] - ext.first));
    edn = std::max(edn, std::abs(sol.trace_dn[i] - ext.second));
    // transmission: gamma * interior derivative of the oracle equals the exterior one
    jump = std::max(jump, std::abs(g * in.second - ext.second) / std::abs(ext.second));
    CHECK(std::abs(g * sol.interior_dn(i) - sol.trace_dn[i]) <= 1e-8 * std::abs(sol.trace_dn[i]) + 1e-15);
  }
  CHECK(eu < 1e-6);
  CHECK(edn < 1e-6);
  CHECK(jump < 1e-8);

  const std::vector<Vec2> pts{{0, 0}, {0.3, -0.2}, {-0.5, 0.4}, {0.1, 0.6}, {1.8, 0.3}, {-2.5, -1}};
  const auto f = evaluate_field(sol, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = ref.total(pts[i].norm(), pts[i].angle());
    CHECK(std::abs(f[i].value - r.first) < 1e-6);
    CHECK(f[i].inside == (pts[i].norm() < 1));
  }
  const auto ff = far_field(sol, 256);
  double e = 0, n = 0;
  for (std::size_t j = 0; j < 256; ++j) {
    e += std::norm(ff.values[j] - ref.far_field(ff.angle(j)));
    n += std::norm(ref.far_field(ff.angle(j)));
  }
  CHECK(std::sqrt(e / n) < 1e-6);
}

TEST_CASE("optical theorem constant checked on the disk, then applied to a triangle") {
  // ||u_inf||^2 = -2 sqrt(2 pi / k) Re(e^{i pi/4} u_inf(d)) under e^{ik|x|}|x|^{-1/2} normalisation
  auto lhs_rhs = [](auto&& ff, std::size_t n, double k, cplx fwd) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(ff(j)) * 2 * kPi / n;
    return std::pair{s, -2 * std::sqrt(2 * kPi / k) * std::real(std::exp(cplx(0, kPi / 4)) * fwd)};
  };
  const double k = 1.7, al = 0.6;
  const oracle::DiskSeries ref(1.0, 3.0, 2.0, k, al);
  const auto [a, b] = lhs_rhs([&](std::size_t j) { return ref.far_field(2 * kPi * j / 256); }, 256, k, ref.far_field(al));
  CHECK(std::abs(a - b) < 1e-12 * a);
  // on the triangle the defect is discretisation error: small and shrinking
  std::vector<double> rel;
  for (int r = 0; r < 2; ++r) {
    MeshOptions m;
    m.refinement = r;
    const auto ff = far_field(solve_scattering(Scatterer(kTri, 3.0, 2.0), IncidentField::plane_wave(k, al), m), 256);
    const auto [c, d] = lhs_rhs([&](std::size_t j) { return ff.values[j]; }, 256, k, ff.interpolate(al));
    rel.push_back(std::abs(c - d) / c);
  }
  CHECK(rel[0] < 1e-4);
  CHECK(rel[1] < rel[0] / 2);
}

TEST_CASE("triangle Cauchy convergence under refinement") {
  const Scatterer s(kEquilateral, 2.0, 1.0);
  const auto inc = IncidentField::plane_wave(1.0, 0.3);
  std::vector<FarFieldPattern> p;
  for (int r = 0; r < 3; ++r) {
    MeshOptions m;
    m.refinement = r;
    p.push_back(far_field(solve_scattering(s, inc, m), 128));
  }
  const double d0 = farfield_l2_distance(p[0], p[1]);
  const double d1 = farfield_l2_distance(p[1], p[2]);
  CHECK(d0 < 1e-4);
  CHECK(d1 <= d0 / 2);
}

TEST_CASE("near-boundary flag and field continuity across the boundary") {
  const Scatterer s(kTri, 2.0, 1.0);
  const auto inc = IncidentField::plane_wave(1.0, 0.3);
  const Vec2 mid{0.0, -0.3}, nrm{0, -1};
  std::vector<double> jumps;
  for (int r = 0; r < 3; ++r) {
    MeshOptions m;
    m.refinement = r;
    const auto sol = solve_scattering(s, inc, m);
    const auto& panels = sol.mesh->panels();
    double L = 0;
    for (const auto& pn : panels)
      if (pn.distance_to(mid) < 1e-12) L = std::max(L, pn.length);
    REQUIRE(L > 0);
    const std::vector<Vec2> pts{mid + nrm * (2 * L), mid - nrm * (2 * L), mid + nrm * 1e-4, {3, 3}};
    const auto f = evaluate_field(sol, pts);
    CHECK_FALSE(f[0].inside);
    CHECK(f[1].inside);
    CHECK(f[2].near_boundary);
    CHECK_FALSE(f[3].near_boundary);
    jumps.push_back(std::abs(f[0].value - f[1].value));
  }
  CHECK(jumps[1] < jumps[0]);
  CHECK(jumps[2] < jumps[1]);
}

TEST_CASE("far field agrees with the scattered near field asymptotically") {
  const double k = 1.0;
  const auto sol = solve_scattering(Scatterer(kTri, 2.0, 1.0), IncidentField::plane_wave(k, 0.3));
  const auto ff = far_field(sol, 256);
  std::vector<double> err;
  for (double R : {1e3, 1e4}) {
    double e = 0;
    for (double th : {0.1, 1.3, 2.9, 4.4}) {
      const Vec2 x = polar(R, th);
      const cplx us = scattered_field(sol, std::span<const Vec2>(&x, 1))[0];
      e = std::max(e, std::abs(std::sqrt(R) * std::exp(cplx(0, -k * R)) * us - ff.interpolate(th)));
    }
    err.push_back(e / max_abs(ff.values));
  }
  CHECK(err[0] < 1e-3);
  CHECK(err[1] < err[0]);
}

TEST_CASE("far-field distance") {
  const auto inc = IncidentField::plane_wave(1.0, 0.0);
  const auto a = far_field(solve_scattering(Scatterer(kTri, 2.0, 1.0), inc), 128);
  CHECK(farfield_l2_distance(a, a) == 0.0);
  FarFieldPattern neg = a;
  for (auto& v : neg.values) v = -v;
  CHECK(farfield_l2_distance(a, neg) == doctest::Approx(2 * a.l2_norm()).epsilon(1e-13));
  FarFieldPattern other = a;
  other.k = 2.0;
  CHECK_THROWS_AS(farfield_l2_distance(a, other), ContractViolation);
  CHECK(farfield_l2_distance(a, a.resampled(512)) < 1e-13 * a.l2_norm());

  const auto s1 = solve_scattering(Scatterer(kTri, 2.0, 1.0), inc);
  const auto s2 = solve_scattering(Scatterer(kTri.translated({0.05, 0}), 2.0, 1.0), inc);
  const double e = farfield_l2_distance(far_field(s1, 64), far_field(s2, 64));
  const double e4 = farfield_l2_distance(far_field(s1, 256), far_field(s2, 256));
  CHECK(std::abs(e - e4) < 1e-8);
  CHECK_THROWS(far_field(s1, 63));
  CHECK_THROWS(far_field(s1, 32));
}

TEST_CASE("incident fields solve the Helmholtz equation") {
  const double k = 2.3, d = 1e-3;
  const std::vector<cplx> dens{{1, 0}, {0.3, -0.2}, {0, 0.5}, {0.1, 0.1}, {-0.4, 0}, {0.2, 0.2}, {0, -0.1}, {0.7, 0}};
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const auto& inc : {IncidentField::plane_wave(k, 0.7), IncidentField::herglotz(k, dens)}) {
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const Vec2 x{u(rng), u(rng)};
      const cplx lap = (inc.value(x + Vec2{d, 0}) + inc.value(x - Vec2{d, 0}) + inc.value(x + Vec2{0, d}) +
                        inc.value(x - Vec2{0, d}) - 4.0 * inc.value(x)) / (d * d);
      const cplx h = (lap + k * k * inc.value(x));
      const auto hs = inc.hessian(x);
      worst = std::max(worst, std::abs(h) / (k * k * std::abs(inc.value(x)) + 1e-300));
      CHECK(std::abs(hs[0] + hs[2] + k * k * inc.value(x)) < 1e-12 * k * k);
    }
    CHECK(worst < 1e-6);
    CHECK(inc.amplitude_s(1.0) > 0);
  }
}

TEST_CASE("mesh invariants") {
  MeshOptions o;
  const auto mesh = make_mesh(Scatterer(kTri, 2.0, 1.0), 1.0, o);
  double perimeter = 0;
  for (std::size_t e = 0; e < 3; ++e) {
    perimeter += kTri.edge_length(e);
    CHECK(mesh->nodes_on_edge(int(e)) >= std::size_t(2 * o.min_panels * o.order));
  }
  double w = 0;
  for (std::size_t i = 0; i < mesh->node_count(); ++i) {
    CHECK(mesh->normals()[i].norm() == doctest::Approx(1.0).epsilon(1e-14));
    w += mesh->weights()[i];
  }
  CHECK(w == doctest::Approx(perimeter).epsilon(1e-13));
  // panels on edge 0 shrink toward both corners
  std::vector<double> len;
  for (const auto& p : mesh->panels())
    if (p.edge == 0) len.push_back(p.length);
  const std::size_t half = len.size() / 2;
  for (std::size_t i = 0; i + 1 < half; ++i) CHECK(len[i] <= len[i + 1] + 1e-15);
  for (std::size_t i = half; i + 1 < len.size(); ++i) CHECK(len[i] >= len[i + 1] - 1e-15);
  MeshOptions r = o;
  r.refinement = 1;
  CHECK(make_mesh(Scatterer(kTri, 2.0, 1.0), 1.0, r)->node_count() == 2 * mesh->node_count());
}

TEST_CASE("linearity in the incident field") {
  const Scatterer s(Polygon({{-0.4, -0.45}, {0.5, -0.35}, {0.45, 0.4}, {-0.5, 0.3}}), 0.5, 2.0);
  const auto i1 = IncidentField::plane_wave(1.0, 0.2), i2 = IncidentField::plane_wave(1.0, 2.1);
  const cplx a{0.7, -0.2}, b{1.3, 0};
  const std::vector<IncidentField> incs{i1, i2, i1.scaled(a) + i2.scaled(b)};
  const auto sols = solve_scattering_many(s, incs, make_mesh(s, 1.0, {}));
  const auto f1 = far_field(sols[0], 64), f2 = far_field(sols[1], 64), f3 = far_field(sols[2], 64);
  double e = 0;
  for (std::size_t j = 0; j < 64; ++j) e = std::max(e, std::abs(f3.values[j] - a * f1.values[j] - b * f2.values[j]));
  CHECK(e < 1e-10 * max_abs(f3.values));
}

TEST_CASE("far-field CSV round trip") {
  const auto ff = far_field(solve_scattering(Scatterer(kTri, 2.0, 1.0), IncidentField::plane_wave(1.0, 0.0)), 64);
  const auto path = (std::filesystem::temp_directory_path() / "sl_ff_test.csv").string();
  write_farfield_csv(path, ff);
  const auto back = read_farfield_csv(path, 1.0);
  CHECK(back.size() == 64);
  CHECK(farfield_l2_distance(ff, back) == 0.0);
  std::filesystem::remove(path);
}
