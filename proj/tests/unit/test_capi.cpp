// Exercises the shared library through its C header only.
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "scatterlab/scatterlab.h"

TEST_CASE("version and exponent") {
  CHECK(std::strlen(sl_version()) > 0);
  double eta = 0, res = 1;
  REQUIRE(sl_singularity_exponent(3.0, M_PI / 2, &eta, &res) == SL_OK);
  CHECK(std::abs(eta - 2 / M_PI * std::acos(0.25)) < 1e-12);
  CHECK(res < 1e-12);
  CHECK(sl_singularity_exponent(1.0, 1.0, &eta, nullptr) == SL_ERR_DOMAIN);
  CHECK(std::strlen(sl_last_error()) > 0);
  CHECK(sl_singularity_exponent(2.0, 1.0, nullptr, nullptr) == SL_ERR_CONTRACT);
}

TEST_CASE("config handles") {
  sl_config* c = nullptr;
  REQUIRE(sl_config_parse("{\"kind\": \"eta\"}", &c) == SL_OK);
  CHECK(std::strcmp(sl_config_kind(c), "eta") == 0);
  char* js = nullptr;
  REQUIRE(sl_config_serialize(c, &js) == SL_OK);
  sl_config* c2 = nullptr;
  REQUIRE(sl_config_parse(js, &c2) == SL_OK);
  char* js2 = nullptr;
  REQUIRE(sl_config_serialize(c2, &js2) == SL_OK);
  CHECK(std::strcmp(js, js2) == 0);
  sl_string_free(js);
  sl_string_free(js2);
  sl_config_free(c2);

  sl_result* r = nullptr;
  REQUIRE(sl_run(c, nullptr, 1, "/tmp/sl_capi_out", &r) == SL_OK);
  CHECK(std::strstr(sl_result_summary(r), "eta = 0.8391") != nullptr);
  CHECK(sl_result_file_count(r) >= 2);
  CHECK(std::strstr(sl_result_manifest(r), "config_hash") != nullptr);
  sl_result_free(r);
  sl_config_free(c);

  sl_config* bad = nullptr;
  CHECK(sl_config_parse("{\"kind\": \"eta\", \"bogus\": 1, \"corner\": {\"gamma\": 1}}", &bad) == SL_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(sl_last_violation_count() >= 2);
  CHECK(sl_config_load("/nonexistent.json", &bad) == SL_ERR_CONFIG);
}

TEST_CASE("direct solve through handles") {
  const double xy[] = {-0.5, -0.3, 0.5, -0.3, 0.0, 0.55};
  sl_scatterer* s = nullptr;
  REQUIRE(sl_scatterer_polygon(xy, 3, 2.0, 1.0, &s) == SL_OK);
  sl_solution* sol = nullptr;
  REQUIRE(sl_solve_plane_wave(s, 1.0, 0.3, 0, 1, &sol) == SL_OK);
  std::vector<double> ff(2 * 64);
  REQUIRE(sl_far_field(sol, 64, ff.data()) == SL_OK);
  double n = 0;
  for (double v : ff) n += v * v;
  CHECK(n > 0);
  CHECK(sl_far_field(sol, 10, ff.data()) != SL_OK);
  const double pts[] = {3.0, 0.0, 0.0, 0.0};
  double u[4];
  REQUIRE(sl_evaluate_field(sol, pts, 2, u) == SL_OK);
  CHECK(std::isfinite(u[0]));
  sl_solution_free(sol);
  sl_scatterer_free(s);

  sl_scatterer* vac = nullptr;
  REQUIRE(sl_scatterer_polygon(xy, 3, 1.0, 1.0, &vac) == SL_OK);
  REQUIRE(sl_solve_plane_wave(vac, 1.0, 0.3, 0, 1, &sol) == SL_OK);
  REQUIRE(sl_far_field(sol, 64, ff.data()) == SL_OK);
  for (double v : ff) CHECK(v == 0.0);
  sl_solution_free(sol);
  sl_scatterer_free(vac);

  CHECK(sl_scatterer_circle(0, 0, -1, 2.0, 1.0, &s) == SL_ERR_DOMAIN);
  CHECK(sl_scatterer_polygon(xy, 3, 1.0, 3.0, &s) == SL_ERR_DOMAIN);
}
