/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "merogeo/merogeo.h"

static int failures = 0;

#define CHECK(cond)                                                                                                   \
    do {                                                                                                              \
        if (!(cond)) {                                                                                                \
            fprintf(stderr, "%s:%d: CHECK(%s) failed; last error: %s\n", __FILE__, __LINE__, #cond,                 \
                    mg_last_error());                                                                                 \
            ++failures;                                                                                               \
        }                                                                                                             \
    } while (0)

static void test_parsing(void)
{
    mg_complex z;
    CHECK(mg_parse_complex("0.5-2i", &z) == MG_OK);
    CHECK(z.re == 0.5 && z.im == -2.0);
    CHECK(mg_parse_complex("u+", &z) == MG_ERR_INPUT);
    CHECK(strlen(mg_last_error()) > 0);
    CHECK(mg_parse_complex(NULL, &z) == MG_ERR_INPUT);

    mg_metric *m = NULL;
    CHECK(mg_metric_parse("N = 2\nb1 = 1\na.2 = u\n", &m) == MG_ERR_INPUT);
    CHECK(m == NULL);
    CHECK(strstr(mg_last_error(), "f.2") != NULL);
    CHECK(mg_metric_load("/nonexistent/file.metric", &m) == MG_ERR_IO);
}

static void test_christoffel_and_trace(void)
{
    mg_metric *m = NULL;
    mg_path *p = NULL;
    mg_config *cfg = mg_config_new();
    char *report = NULL;
    double dev = -1.0;
    mg_complex u[2] = {{2.0, 0.0}, {0.0, 0.0}};
    mg_complex v[2] = {{1.0, 0.0}, {0.0, 0.0}};
    mg_trace *t = NULL;
    mg_complex z, uu[2], vv[2];
    size_t last;

    CHECK(mg_config_set_string(cfg, "command", "capi") == MG_OK);
    CHECK(mg_config_set_double(cfg, "tol", 1e-10) == MG_OK);
    CHECK(mg_metric_parse("N = 2\nb1 = u\na.2 = 1\nf.2 = 1\n", &m) == MG_OK);
    CHECK(mg_metric_dimension(m) == 2);

    CHECK(mg_christoffel(m, u, 2, MG_FORMAT_JSON, cfg, &report, &dev) == MG_OK);
    CHECK(dev == 0.0);
    CHECK(strstr(report, "\"command\":\"capi\"") != NULL);
    CHECK(strstr(report, "\"version\":\"") != NULL);
    mg_string_free(report);
    CHECK(mg_christoffel(m, u, 1, MG_FORMAT_JSON, cfg, &report, &dev) == MG_ERR_INPUT);

    /* b1 = u: geodesics satisfy u1^(3/2) affine in z. */
    CHECK(mg_path_parse("seg 0 1", &p) == MG_OK);
    CHECK(fabs(mg_path_arclength(p) - 1.0) < 1e-15);
    CHECK(mg_trace_run(m, p, u, v, 2, 1e-10, &t) == MG_OK);
    CHECK(mg_trace_terminal(t) == MG_COMPLETED);
    last = mg_trace_samples(t) - 1;
    CHECK(mg_trace_state(t, last, &z, uu, vv) == MG_OK);
    CHECK(fabs(z.re - 1.0) < 1e-15);
    /* u1^(3/2) = 2^(3/2) + (3/2) sqrt(2) z */
    CHECK(fabs(pow(uu[0].re, 1.5) - (pow(2.0, 1.5) + 1.5 * sqrt(2.0))) < 1e-8);
    CHECK(mg_trace_max_residual(t) < 1e-8);
    CHECK(mg_trace_render(t, MG_FORMAT_CSV, cfg, &report) == MG_OK);
    CHECK(strncmp(report, "# merogeo ", 10) == 0);
    mg_string_free(report);
    CHECK(mg_trace_state(t, last + 1, &z, uu, vv) == MG_ERR_INPUT);
    mg_trace_free(t);

    /* Degenerate seed and bad tolerance. */
    u[0].re = 0.0;
    CHECK(mg_trace_run(m, p, u, v, 2, 1e-10, &t) == MG_ERR_INPUT);
    u[0].re = 2.0;
    CHECK(mg_trace_run(m, p, u, v, 2, 0.5, &t) == MG_ERR_INPUT);

    mg_path_free(p);
    mg_metric_free(m);
    mg_config_free(cfg);
}

static void test_monodromy_classify(void)
{
    mg_ode *o = NULL;
    mg_path *loop = NULL, *approach = NULL;
    mg_complex y0 = {1.0, 0.0};
    mg_complex one = {1.0, 0.0};
    char *report = NULL;
    int returned = -1, kind = -1;

    CHECK(mg_ode_parse("dim = 1\nrhs.1 = 1/(2*y)\n", &o) == MG_OK);
    CHECK(mg_ode_dimension(o) == 1);
    CHECK(mg_path_parse("arc 0 1 0 2*pi", &loop) == MG_OK);
    CHECK(mg_monodromy_ode(o, loop, &y0, 1, 4, 1e-10, MG_FORMAT_CSV, NULL, &report, &returned) == MG_OK);
    CHECK(returned == 2);
    mg_string_free(report);
    mg_ode_free(o);

    CHECK(mg_ode_parse("dim = 1\nrhs.1 = y^2\n", &o) == MG_OK);
    CHECK(mg_path_parse("seg 0 1", &approach) == MG_OK);
    CHECK(mg_classify_ode(o, approach, one, &y0, 1, 1e-10, MG_FORMAT_JSON, NULL, &report, &kind) == MG_OK);
    CHECK(kind == 1);
    CHECK(strstr(report, "\"kind\":\"PoleLike\"") != NULL);
    mg_string_free(report);

    /* y = 1/(i - z) has its pole on the unit circle: the loop stops mid-way. */
    y0.re = -0.5;
    y0.im = -0.5;
    CHECK(mg_monodromy_ode(o, loop, &y0, 1, 2, 1e-10, MG_FORMAT_CSV, NULL, &report, &returned) == MG_ERR_NUMERIC);
    mg_string_free(report);

    mg_ode_free(o);
    mg_path_free(loop);
    mg_path_free(approach);
}

static void test_coercive_probe_quad(void)
{
    mg_esempio *e = NULL;
    mg_metric *m = NULL;
    mg_verdict verdict = MG_NOT_CERTIFIED;
    char *report = NULL;
    mg_complex z0 = {0.0, 0.0};
    mg_complex u[2] = {{0.0, 0.0}, {0.0, 0.0}};
    mg_complex v[2] = {{0.6, 0.0}, {0.8, 0.0}};
    mg_complex a = {1.0, 0.0}, b = {0.0, 0.0}, c = {1.0, 0.0};
    size_t witnesses = 0;
    int exceeded = -1;
    double err = -1.0;

    CHECK(mg_esempio_parse("N = 2\nh = u\nf.2 = 1\nP.2 = 1, 0, 1\n", &e) == MG_OK);
    CHECK(mg_coercive(e, MG_FORMAT_TEXT, NULL, &report, &verdict) == MG_OK);
    CHECK(verdict == MG_COERCIVE);
    CHECK(strstr(report, "verdict: Coercive") != NULL);
    mg_string_free(report);
    mg_esempio_free(e);

    CHECK(mg_metric_parse("N = 2\ndomain.1 = disc\nb1 = 1\na.2 = 1\nf.2 = 1\n", &m) == MG_OK);
    CHECK(mg_probe(m, z0, u, v, 2, 4, 5.0, 1e-10, 0, MG_FORMAT_JSON, NULL, &report, &witnesses, &exceeded) ==
          MG_OK);
    CHECK(witnesses == 4);
    CHECK(exceeded == 0);
    mg_string_free(report);
    CHECK(mg_probe(m, z0, u, v, 2, 0, 5.0, 1e-10, 0, MG_FORMAT_JSON, NULL, &report, &witnesses, &exceeded) ==
          MG_ERR_INPUT);
    mg_metric_free(m);

    CHECK(mg_quadcheck(a, b, c, 20, 1, MG_FORMAT_CSV, NULL, &report, &err) == MG_OK);
    CHECK(err >= 0.0 && err <= 1e-9);
    mg_string_free(report);
    a.re = 0.0;
    c.re = 0.0;
    CHECK(mg_quadcheck(a, b, c, 20, 1, MG_FORMAT_CSV, NULL, &report, &err) == MG_ERR_INPUT);
}

int main(void)
{
    CHECK(strlen(mg_version()) > 0);
    test_parsing();
    test_christoffel_and_trace();
    test_monodromy_classify();
    test_coercive_probe_quad();
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("all C API checks passed\n");
    return 0;
}
