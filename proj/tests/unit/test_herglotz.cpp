#include <filesystem>
#include <random>

#include "../oracles.hpp"
#include "doctest.h"
#include "scatterlab/herglotz.hpp"

using namespace scatterlab;
using namespace scatterlab::herglotz;
using geometry::Polygon;

namespace {

const Polygon kD({{-0.5, -0.4}, {0.6, -0.3}, {0.0, 0.6}});
const std::vector<std::pair<int, cplx>> kModes{{0, {1, 0}}, {1, {0.5, -0.2}}, {-2, {0.3, 0.1}}};

GridSamples target_of(const HerglotzDensity& g, double k, double spacing = 0.04) {
  auto grid = GridSamples::on_polygon(kD, spacing);
  grid.sample([&](Vec2 x) { return herglotz_wave(g, k, x); });
  return grid;
}

double oracle_det(int n, double k, double r, double g, double q) {
  const double k1 = k * std::sqrt(q / g);
  return g * k1 * oracle::jp(n, k1 * r) * oracle::j(n, k * r) - k * oracle::j(n, k1 * r) * oracle::jp(n, k * r);
}

}  // namespace

TEST_CASE("density size contract") {
  CHECK_THROWS(HerglotzDensity(std::vector<cplx>(30)));
  CHECK_THROWS(HerglotzDensity(std::vector<cplx>(33)));
  CHECK_NOTHROW(HerglotzDensity(std::vector<cplx>(32)));
  CHECK(HerglotzDensity::zero(64).l2_norm() == 0.0);
}

TEST_CASE("Herglotz wave synthesis") {
  const double k = 1.7;
  const auto zero = HerglotzDensity::zero(64);
  CHECK(std::abs(herglotz_wave(zero, k, Vec2{0.3, 0.2})) == 0.0);
  const HerglotzDensity one(std::vector<cplx>(64, 1.0));
  for (int i = 0; i < 20; ++i) {
    const double r = 0.25 * i;
    const Vec2 x = polar(r, 0.37 * i);
    CHECK(std::abs(herglotz_wave(one, k, x) - 2 * kPi * oracle::j(0, k * r)) < 1e-10);
  }
  const auto g = HerglotzDensity::trigonometric(64, kModes);
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const double d = 1e-3;
  double worst = 0;
  for (int i = 0; i < 30; ++i) {
    const Vec2 x{u(rng), u(rng)};
    const cplx v = herglotz_wave(g, k, x);
    const cplx lap = (herglotz_wave(g, k, x + Vec2{d, 0}) + herglotz_wave(g, k, x - Vec2{d, 0}) +
                      herglotz_wave(g, k, x + Vec2{0, d}) + herglotz_wave(g, k, x - Vec2{0, d}) - 4.0 * v) / (d * d);
    worst = std::max(worst, std::abs(lap + k * k * v) / (k * k * std::abs(v)));
  }
  CHECK(worst < 1e-6);
  // superposition
  const auto h = HerglotzDensity::trigonometric(64, std::vector<std::pair<int, cplx>>{{3, {0, 1}}});
  std::vector<cplx> s(64);
  const cplx a{0.4, 0.9}, b{-1.2, 0.1};
  for (std::size_t j = 0; j < 64; ++j) s[j] = a * g.values()[j] + b * h.values()[j];
  const Vec2 x{0.2, -0.7};
  CHECK(std::abs(herglotz_wave(HerglotzDensity(s), k, x) - a * herglotz_wave(g, k, x) - b * herglotz_wave(h, k, x)) <
        1e-12);
}

TEST_CASE("density fit: recovery, zero target and errors") {
  const auto g = HerglotzDensity::trigonometric(64, kModes);
  const auto grid = target_of(g, 1.0, 0.02);
  const auto fit = herglotz_density_fit(grid, 1.0, 1e-10, 64);
  double e = 0;
  for (std::size_t j = 0; j < 64; ++j) e += std::norm(fit.density.values()[j] - g.values()[j]);
  CHECK(std::sqrt(e * 2 * kPi / 64) / g.l2_norm() < 1e-2);

  auto zero = GridSamples::on_polygon(kD, 0.04);
  zero.sample([](Vec2) { return cplx{0, 0}; });
  const auto z = herglotz_density_fit(zero, 1.0, 1e-6, 64);
  CHECK(z.g_norm == 0.0);
  CHECK(z.epsilon == 0.0);
  CHECK_THROWS(herglotz_density_fit(grid, 1.0, 0.0, 64));
  CHECK_THROWS(herglotz_density_fit(grid, 1.0, -1.0, 64));
  const auto lazy = herglotz_density_fit(grid, 1.0, 1e2, 64, 1e-9);
  CHECK_FALSE(lazy.achieved);
  CHECK(lazy.epsilon > 1e-9);
}

TEST_CASE("L-curve monotonicity and direction doubling") {
  // corner-singular target so the curve is not flat
  const auto g = HerglotzDensity::trigonometric(64, kModes);
  auto grid = GridSamples::on_polygon(kD, 0.04);
  const Vec2 c = kD.vertex(0);
  grid.sample([&](Vec2 x) { return herglotz_wave(g, 1.0, x) + std::pow((x - c).norm(), 0.6); });
  const HerglotzFitter f64(grid, 1.0, 64), f128(grid, 1.0, 128);
  double pe = 1e300, pg = 0;
  for (int p = 2; p <= 12; ++p) {
    const double lam = std::pow(10.0, -p);
    const auto r = f64.fit(lam);
    CHECK(r.epsilon <= pe * (1 + 1e-9));
    CHECK(r.g_norm >= pg * (1 - 1e-9));
    pe = r.epsilon;
    pg = r.g_norm;
    const auto r2 = f128.fit(lam);
    CHECK(r2.epsilon <= r.epsilon * (1 + 1e-6) + 1e-12 * grid.h1_norm());
  }
}

TEST_CASE("disk transmission eigenvalues") {
  const double r = 1, g = 1, q = 4;
  const auto ev = disk_transmission_eigenvalues(r, g, q, 0.1, 6.0, 0, 4, 10000);
  REQUIRE(!ev.empty());
  // dense-sampling oracle with Boost Bessel functions
  std::size_t expected = 0;
  for (int n = 0; n <= 4; ++n) {
    double prev = oracle_det(n, 0.1, r, g, q);
    for (int i = 1; i <= 10000; ++i) {
      const double k = 0.1 + 5.9 * i / 10000, v = oracle_det(n, k, r, g, q);
      if ((v < 0) != (prev < 0)) {
        ++expected;
        bool found = false;
        for (const auto& e : ev) found |= e.mode == n && std::abs(e.k - k) <= 5.9 / 10000;
        CHECK(found);
      }
      prev = v;
    }
  }
  CHECK(ev.size() == expected);
  for (const auto& e : ev) {
    CHECK(std::abs(e.determinant) < 1e-8 * e.local_scale);
    CHECK(std::abs(disk_transmission_determinant(e.mode, e.k, r, g, q) - oracle_det(e.mode, e.k, r, g, q)) <
          1e-12 * e.local_scale);
  }
  const auto fine = disk_transmission_eigenvalues(r, g, q, 0.1, 6.0, 0, 4, 20000);
  REQUIRE(fine.size() == ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(fine[i].k - ev[i].k) < 1e-8);
  for (const auto& e : disk_transmission_eigenvalues(r, g, q, 1e-3, 6.0, 0, 4, 10000)) CHECK(e.k >= 0.1);
  CHECK(disk_transmission_eigenvalues(r, g, q, 0.1, 0.2, 0, 0, 100).empty());
}

TEST_CASE("Hoelder quotient probe on synthetic fields") {
  const auto fr = geometry::corner_frame(kD, kD, kD.vertex(0));
  const double eta = 0.7;
  HolderSchedule sch;
  auto field = [&](auto&& fn) {
    return [&, fn](std::span<const Vec2> p) {
      std::vector<cplx> v;
      for (const Vec2& x : p) {
        const Vec2 y = fr.to_frame(x);
        v.push_back(fn(y.norm(), y.angle()));
      }
      return v;
    };
  };
  const auto smooth = holder_quotient_probe(
      field([&](double r, double t) { return cplx(1 + 0.5 * r * std::cos(t) + r * r * std::sin(t) * std::cos(t)); }),
      fr, eta, sch);
  CHECK(smooth.slope == doctest::Approx(1 - eta).epsilon(0.1));
  CHECK(smooth.rows.back().quotient < smooth.rows.front().quotient);

  const auto sing = holder_quotient_probe(field([&](double r, double t) { return cplx(std::pow(r, eta) * std::cos(eta * t)); }),
                                          fr, eta, sch);
  double qmin = 1e300;
  for (const auto& row : sing.rows) qmin = std::min(qmin, row.quotient);
  CHECK(qmin > 0.1);
  CHECK(std::abs(sing.slope) < 0.05);

  const double e2 = 0.9;
  const auto higher = holder_quotient_probe(field([&](double r, double t) { return cplx(std::pow(r, e2) * std::cos(e2 * t)); }),
                                            fr, eta, sch);
  CHECK(higher.slope == doctest::Approx(e2 - eta).epsilon(0.1));
}

TEST_CASE("density CSV round trip") {
  const auto g = HerglotzDensity::trigonometric(32, kModes);
  const auto path = (std::filesystem::temp_directory_path() / "sl_density.csv").string();
  write_density_csv(path, g);
  const auto back = read_density_csv(path);
  REQUIRE(back.size() == 32);
  for (std::size_t j = 0; j < 32; ++j) CHECK(back.values()[j] == g.values()[j]);
  std::filesystem::remove(path);
}
