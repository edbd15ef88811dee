/* scatterlab C interface. Opaque handles, status codes, no exceptions.
 * Every call returns SL_OK or an error code; sl_last_error() then holds the
 * message for the calling thread. Strings returned through char** are owned
 * by the caller and released with sl_string_free. */
#ifndef SCATTERLAB_H
#define SCATTERLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SL_API __declspec(dllexport)
#else
#define SL_API __attribute__((visibility("default")))
#endif

typedef enum {
  SL_OK = 0,
  SL_ERR_IO = 1,
  SL_ERR_CONFIG = 2,
  SL_ERR_SOLVER = 3,
  SL_ERR_CONTRACT = 4,
  SL_ERR_DOMAIN = 5,
  SL_ERR_DEGENERATE = 6,
  SL_ERR_RANGE = 7,
  SL_ERR_INTERNAL = 9
} sl_status;

typedef struct sl_config sl_config;
typedef struct sl_result sl_result;
typedef struct sl_scatterer sl_scatterer;
typedef struct sl_solution sl_solution;

SL_API const char* sl_version(void);
SL_API const char* sl_last_error(void);
SL_API void sl_string_free(char* s);

/* ---- experiment configs ---- */
SL_API sl_status sl_config_load(const char* path, sl_config** out);
SL_API sl_status sl_config_parse(const char* json_text, sl_config** out);
/* Number of collected violations from the last failed load/parse on this thread. */
SL_API size_t sl_last_violation_count(void);
SL_API const char* sl_last_violation(size_t i);
SL_API sl_status sl_config_serialize(const sl_config* c, char** json_out);
SL_API const char* sl_config_kind(const sl_config* c);
SL_API void sl_config_free(sl_config* c);

/* kind NULL or "" runs the config's own kind; out_dir NULL uses the config's output. */
SL_API sl_status sl_run(const sl_config* c, const char* kind, int threads, const char* out_dir,
                        sl_result** out);
SL_API const char* sl_result_summary(const sl_result* r);
SL_API const char* sl_result_manifest(const sl_result* r);
SL_API size_t sl_result_file_count(const sl_result* r);
SL_API const char* sl_result_file(const sl_result* r, size_t i);
SL_API void sl_result_free(sl_result* r);

/* ---- direct numerics ---- */
SL_API sl_status sl_singularity_exponent(double gamma, double opening, double* eta, double* residual);

/* xy holds n (x, y) pairs. */
SL_API sl_status sl_scatterer_polygon(const double* xy, size_t n, double gamma, double q, sl_scatterer** out);
SL_API sl_status sl_scatterer_circle(double cx, double cy, double radius, double gamma, double q,
                                     sl_scatterer** out);
SL_API void sl_scatterer_free(sl_scatterer* s);

/* Plane wave e^{i k x.(cos a, sin a)}; refinement doubles panels per level. */
SL_API sl_status sl_solve_plane_wave(const sl_scatterer* s, double k, double angle, int refinement, int threads,
                                     sl_solution** out);
SL_API void sl_solution_free(sl_solution* s);
/* n far-field samples at theta_j = 2 pi j / n written as interleaved (re, im). */
SL_API sl_status sl_far_field(const sl_solution* s, size_t n, double* re_im);
/* Total field at m points (xy pairs) written as interleaved (re, im). */
SL_API sl_status sl_evaluate_field(const sl_solution* s, const double* xy, size_t m, double* re_im);

#ifdef __cplusplus
}
#endif

#endif
