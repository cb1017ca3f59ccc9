/* C interface to the merogeo library. Every function that can fail returns an
 * mg_status; the message of the last failure on the calling thread is available
 * from mg_last_error(). Strings returned through char** are owned by the caller
 * and released with mg_string_free(). */
#ifndef MEROGEO_H
#define MEROGEO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MG_API __declspec(dllexport)
#else
#define MG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mg_status {
    MG_OK = 0,
    MG_ERR_INPUT = 1,    /* malformed file, bad argument, non-ordinary seed */
    MG_ERR_NUMERIC = 2,  /* step underflow, Newton divergence, mid-loop stop */
    MG_ERR_IO = 3,
    MG_ERR_INTERNAL = 4
} mg_status;

typedef enum mg_format { MG_FORMAT_CSV = 0, MG_FORMAT_JSON = 1, MG_FORMAT_TEXT = 2 } mg_format;

typedef enum mg_terminal { MG_COMPLETED = 0, MG_SINGULAR_STOP = 1, MG_DOMAIN_EXIT = 2 } mg_terminal;

typedef enum mg_verdict { MG_COERCIVE = 0, MG_NOT_CERTIFIED = 1 } mg_verdict;

typedef struct mg_complex {
    double re;
    double im;
} mg_complex;

typedef struct mg_metric mg_metric;
typedef struct mg_path mg_path;
typedef struct mg_ode mg_ode;
typedef struct mg_esempio mg_esempio;
typedef struct mg_trace mg_trace;
typedef struct mg_config mg_config;

MG_API const char *mg_version(void);
MG_API const char *mg_last_error(void);
MG_API void mg_string_free(char *s);

/* Complex literal in expression syntax, e.g. "0.3-2i". */
MG_API mg_status mg_parse_complex(const char *text, mg_complex *out);

/* Ordered key/value echo embedded in every rendered output. */
MG_API mg_config *mg_config_new(void);
MG_API void mg_config_free(mg_config *c);
MG_API mg_status mg_config_set_string(mg_config *c, const char *key, const char *value);
MG_API mg_status mg_config_set_double(mg_config *c, const char *key, double value);
MG_API mg_status mg_config_set_int(mg_config *c, const char *key, long long value);
MG_API mg_status mg_config_set_bool(mg_config *c, const char *key, int value);

/* Metric, path, ODE and example-class files, from text or from a file path. */
MG_API mg_status mg_metric_parse(const char *text, mg_metric **out);
MG_API mg_status mg_metric_load(const char *path, mg_metric **out);
MG_API void mg_metric_free(mg_metric *m);
MG_API size_t mg_metric_dimension(const mg_metric *m);

MG_API mg_status mg_path_parse(const char *text, mg_path **out);
MG_API mg_status mg_path_load(const char *path, mg_path **out);
MG_API void mg_path_free(mg_path *p);
MG_API double mg_path_arclength(const mg_path *p);
MG_API mg_complex mg_path_start(const mg_path *p);

MG_API mg_status mg_ode_parse(const char *text, mg_ode **out);
MG_API mg_status mg_ode_load(const char *path, mg_ode **out);
MG_API void mg_ode_free(mg_ode *o);
MG_API size_t mg_ode_dimension(const mg_ode *o);

MG_API mg_status mg_esempio_parse(const char *text, mg_esempio **out);
MG_API mg_status mg_esempio_load(const char *path, mg_esempio **out);
MG_API void mg_esempio_free(mg_esempio *e);

/* Both Christoffel tables at u (n = metric dimension). */
MG_API mg_status mg_christoffel(const mg_metric *m, const mg_complex *u, size_t n, mg_format fmt,
                                const mg_config *config, char **report, double *max_deviation);

/* Geodesic along the path from its start with initial data u0, udot0. */
MG_API mg_status mg_trace_run(const mg_metric *m, const mg_path *p, const mg_complex *u0, const mg_complex *udot0,
                              size_t n, double tol, mg_trace **out);
MG_API void mg_trace_free(mg_trace *t);
MG_API size_t mg_trace_samples(const mg_trace *t);
MG_API mg_terminal mg_trace_terminal(const mg_trace *t);
/* Terminal description, e.g. "SingularStop cause=StepUnderflow ... singularity=PoleLike(1)". */
MG_API mg_status mg_trace_summary(const mg_trace *t, char **out);
MG_API double mg_trace_max_residual(const mg_trace *t);
MG_API double mg_trace_speed_drift(const mg_trace *t);
/* Copies u(z) and udot(z) of sample i. */
MG_API mg_status mg_trace_state(const mg_trace *t, size_t i, mg_complex *z, mg_complex *u, mg_complex *udot);
MG_API mg_status mg_trace_render(const mg_trace *t, mg_format fmt, const mg_config *config, char **out);

/* Continuation around a closed loop. For a metric the state is (u0, udot0);
 * for an ODE it is y0. `returned` receives the loop count (0 when none). */
MG_API mg_status mg_monodromy_metric(const mg_metric *m, const mg_path *loop, const mg_complex *u0,
                                     const mg_complex *udot0, size_t n, int max_loops, double tol, mg_format fmt,
                                     const mg_config *config, char **report, int *returned);
MG_API mg_status mg_monodromy_ode(const mg_ode *o, const mg_path *loop, const mg_complex *y0, size_t d,
                                  int max_loops, double tol, mg_format fmt, const mg_config *config, char **report,
                                  int *returned);

/* Singularity class at `center`, approached along `approach`. `kind` receives
 * 0 Removable, 1 PoleLike, 2 BranchLike, 3 Logarithmic, 4 Undetermined. */
MG_API mg_status mg_classify_metric(const mg_metric *m, const mg_path *approach, mg_complex center,
                                    const mg_complex *u0, const mg_complex *udot0, size_t n, double tol,
                                    mg_format fmt, const mg_config *config, char **report, int *kind);
MG_API mg_status mg_classify_ode(const mg_ode *o, const mg_path *approach, mg_complex center, const mg_complex *y0,
                                 size_t d, double tol, mg_format fmt, const mg_config *config, char **report,
                                 int *kind);

MG_API mg_status mg_coercive(const mg_esempio *e, mg_format fmt, const mg_config *config, char **report,
                             mg_verdict *verdict);

/* Fan of `rays` rays of length `radius` from z0; budget 0 keeps the default. */
MG_API mg_status mg_probe(const mg_metric *m, mg_complex z0, const mg_complex *u0, const mg_complex *udot0, size_t n,
                          int rays, double radius, double tol, uint64_t budget, mg_format fmt,
                          const mg_config *config, char **report, size_t *witnesses, int *budget_exceeded);

/* Derivative self-test of the antiderivative of 1/sqrt(a x^2 + b x + c). */
MG_API mg_status mg_quadcheck(mg_complex a, mg_complex b, mg_complex c, int points, uint64_t seed, mg_format fmt,
                              const mg_config *config, char **report, double *max_error);

/* Temporary file in the same directory, then rename. */
MG_API mg_status mg_write_file_atomic(const char *path, const char *data, size_t size);

#ifdef __cplusplus
}
#endif

#endif
