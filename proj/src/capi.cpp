#include "scatterlab/scatterlab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "scatterlab/app.hpp"
#include "scatterlab/config.hpp"
#include "scatterlab/corner.hpp"
#include "scatterlab/forward.hpp"

using namespace scatterlab;

struct sl_config {
  config::ExperimentConfig cfg;
  std::string canon;
};
struct sl_result {
  app::RunResult r;
};
struct sl_scatterer {
  forward::Scatterer s;
};
struct sl_solution {
  forward::FieldSolution s;
};

namespace {

thread_local std::string g_error;
thread_local std::vector<std::string> g_violations;

sl_status fail(sl_status st, const std::string& msg) {
  g_error = msg;
  return st;
}

// Runs f, mapping exceptions onto status codes.
template <class F>
sl_status guarded(F&& f) {
  g_error.clear();
  try {
    f();
    return SL_OK;
  } catch (const config::ConfigErrors& e) {
    g_violations = e.violations();
    return fail(SL_ERR_CONFIG, e.what());
  } catch (const Error& e) {
    return fail(static_cast<sl_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SL_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* sl_version(void) { return app::kVersion; }
const char* sl_last_error(void) { return g_error.c_str(); }
void sl_string_free(char* s) { std::free(s); }

size_t sl_last_violation_count(void) { return g_violations.size(); }
const char* sl_last_violation(size_t i) { return i < g_violations.size() ? g_violations[i].c_str() : ""; }

sl_status sl_config_load(const char* path, sl_config** out) {
  if (!path || !out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  g_violations.clear();
  return guarded([&] {
    auto c = std::make_unique<sl_config>();
    c->cfg = config::parse_config(path);
    c->canon = config::serialize_config(c->cfg);
    *out = c.release();
  });
}

sl_status sl_config_parse(const char* text, sl_config** out) {
  if (!text || !out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  g_violations.clear();
  return guarded([&] {
    auto c = std::make_unique<sl_config>();
    c->cfg = config::parse_config_text(text);
    c->canon = config::serialize_config(c->cfg);
    *out = c.release();
  });
}

sl_status sl_config_serialize(const sl_config* c, char** json_out) {
  if (!c || !json_out) return fail(SL_ERR_CONTRACT, "null argument");
  *json_out = dup(c->canon);
  return *json_out ? SL_OK : fail(SL_ERR_INTERNAL, "out of memory");
}

const char* sl_config_kind(const sl_config* c) { return c ? c->cfg.kind.c_str() : ""; }
void sl_config_free(sl_config* c) { delete c; }

sl_status sl_run(const sl_config* c, const char* kind, int threads, const char* out_dir, sl_result** out) {
  if (!c || !out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  g_violations.clear();
  return guarded([&] {
    app::RunOptions o;
    o.kind = kind ? kind : "";
    o.threads = threads;
    o.out_dir = out_dir ? out_dir : "";
    auto r = std::make_unique<sl_result>();
    r->r = app::run(c->cfg, o);
    *out = r.release();
  });
}

const char* sl_result_summary(const sl_result* r) { return r ? r->r.summary.c_str() : ""; }
const char* sl_result_manifest(const sl_result* r) { return r ? r->r.manifest_json.c_str() : ""; }
size_t sl_result_file_count(const sl_result* r) { return r ? r->r.files.size() : 0; }
const char* sl_result_file(const sl_result* r, size_t i) {
  return r && i < r->r.files.size() ? r->r.files[i].c_str() : "";
}
void sl_result_free(sl_result* r) { delete r; }

sl_status sl_singularity_exponent(double gamma, double opening, double* eta, double* residual) {
  if (!eta) return fail(SL_ERR_CONTRACT, "null argument");
  return guarded([&] {
    const long double ext = corner::singularity_exponent_ext(gamma, opening);
    *eta = static_cast<double>(ext);
    if (residual) *residual = corner::exponent_residual(gamma, opening, ext);
  });
}

sl_status sl_scatterer_polygon(const double* xy, size_t n, double gamma, double q, sl_scatterer** out) {
  if (!xy || !out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<Vec2> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
    *out = new sl_scatterer{forward::Scatterer(geometry::Polygon(std::move(v)), gamma, q)};
  });
}

sl_status sl_scatterer_circle(double cx, double cy, double radius, double gamma, double q, sl_scatterer** out) {
  if (!out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  return guarded([&] {
    if (!(radius > 0)) throw DomainError("circle radius must be > 0");
    *out = new sl_scatterer{forward::Scatterer(forward::Circle{{cx, cy}, radius}, gamma, q)};
  });
}

void sl_scatterer_free(sl_scatterer* s) { delete s; }

sl_status sl_solve_plane_wave(const sl_scatterer* s, double k, double angle, int refinement, int threads,
                              sl_solution** out) {
  if (!s || !out) return fail(SL_ERR_CONTRACT, "null argument");
  *out = nullptr;
  return guarded([&] {
    forward::MeshOptions m;
    m.refinement = refinement;
    forward::SolveOptions so;
    so.threads = threads;
    *out = new sl_solution{
        forward::solve_scattering(s->s, forward::IncidentField::plane_wave(k, angle), m, so)};
  });
}

void sl_solution_free(sl_solution* s) { delete s; }

sl_status sl_far_field(const sl_solution* s, size_t n, double* re_im) {
  if (!s || !re_im) return fail(SL_ERR_CONTRACT, "null argument");
  return guarded([&] {
    const auto p = forward::far_field(s->s, n);
    for (size_t j = 0; j < n; ++j) {
      re_im[2 * j] = p.values[j].real();
      re_im[2 * j + 1] = p.values[j].imag();
    }
  });
}

sl_status sl_evaluate_field(const sl_solution* s, const double* xy, size_t m, double* re_im) {
  if (!s || !xy || !re_im) return fail(SL_ERR_CONTRACT, "null argument");
  return guarded([&] {
    std::vector<Vec2> pts(m);
    for (size_t i = 0; i < m; ++i) pts[i] = {xy[2 * i], xy[2 * i + 1]};
    const auto f = forward::evaluate_field(s->s, pts);
    for (size_t i = 0; i < m; ++i) {
      re_im[2 * i] = f[i].value.real();
      re_im[2 * i + 1] = f[i].value.imag();
    }
  });
}

}  // extern "C"
