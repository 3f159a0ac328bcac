/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hgibbs/hgibbs.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: EXPECT(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

int main(void) {
  hg_geometry line = {1, 0};
  hg_geometry plane = {2, 0};
  double v = 0.0;
  char buf[256];

  EXPECT(strlen(hg_version()) > 0);
  EXPECT(strcmp(hg_status_name(HG_ERR_CONFIG), "config") == 0);

  EXPECT(hg_eigenvalue(12, line, &v) == HG_OK && fabs(v - 5.0) < 1e-14);
  EXPECT(hg_geometry_check(line, buf, sizeof buf) == HG_OK);
  EXPECT(hg_geometry_check(plane, buf, sizeof buf) == HG_ERR_CONFIG);
  EXPECT(strstr(buf, "radial") != NULL);
  EXPECT(hg_eigenvalue(-1, line, &v) != HG_OK);
  EXPECT(strlen(hg_last_error()) > 0);
  EXPECT(hg_eval_eigenfunction(1 << 20, 0.0, line, &v) == HG_ERR_CAPABILITY);

  hg_basis* b = NULL;
  EXPECT(hg_basis_build(line, 16, 1e-10, &b) == HG_OK);
  hg_basis_report rep;
  EXPECT(hg_basis_verify(b, 16, &rep) == HG_OK);
  EXPECT(rep.max_orthonormality_error <= 1e-10);
  size_t G = 0;
  EXPECT(hg_basis_grid_size(b, &G) == HG_OK && G > 0);
  double wrong[3] = {0, 0, 0}, coeff[17];
  EXPECT(hg_basis_project(b, wrong, 3, coeff, 17) == HG_ERR_SHAPE);
  EXPECT(hg_eigen_lp_norm(b, 0, 2.0, &v) == HG_OK && fabs(v - 1.0) < 1e-10);

  hg_mc_options opt = {7, 2000, 500, 1, HG_LAW_REAL};
  hg_gibbs_spec spec = {line, 4.0, 1.0, 16, 1.0, 0};
  hg_estimate e1, e2;
  EXPECT(hg_estimate_partition(&spec, b, &opt, &e1) == HG_OK);
  opt.threads = 3;
  EXPECT(hg_estimate_partition(&spec, b, &opt, &e2) == HG_OK);
  EXPECT(e1.mean == e2.mean && e1.std_error == e2.std_error);
  EXPECT(e1.n_samples == 2000 && e1.chunks == 4);

  hg_gibbs_spec bad = {{3, 1}, 7.0, 1.0, 8, 1.0, 0};
  EXPECT(hg_gibbs_check(&bad, buf, sizeof buf) == HG_ERR_CONFIG);
  EXPECT(hg_estimate_partition(&bad, b, &opt, &e1) == HG_ERR_CONFIG);

  spec.N = 0;
  spec.r = 0.0;
  EXPECT(hg_exact_partition_n0(&spec, HG_LAW_COMPLEX, &v) == HG_OK && fabs(v - (1 - exp(-2.0))) < 1e-10);

  int N = 0;
  EXPECT(hg_default_mode_cutoff(16, line, 1.0, &N) == HG_OK && N == 128);
  hg_plan* plan = NULL;
  EXPECT(hg_plan_create(16, N, 1.0, line, &plan) == HG_OK);
  hg_plan_info info;
  EXPECT(hg_plan_info_get(plan, &info) == HG_OK && info.alpha > 0 && !info.null_drift);
  hg_lemma_values lv;
  EXPECT(hg_lemma_values_get(16, N, line, HG_LAW_REAL, &lv) == HG_OK);
  EXPECT(fabs(lv.alpha - info.alpha) < 1e-12 * info.alpha);
  double lo, hi;
  const char* name = NULL;
  EXPECT(hg_lemma_ratio(&lv, 5, &v, &name, &lo, &hi) == HG_OK && name != NULL && v >= lo && v <= hi);
  EXPECT(hg_lemma_ratio(&lv, 6, &v, &name, &lo, &hi) == HG_ERR_INVALID_ARGUMENT);
  EXPECT(hg_plan_create(16, 4, 1.0, line, &plan) != HG_OK);
  hg_plan_free(plan);

  hg_profile* prof = NULL;
  EXPECT(hg_profile_build(32, line, 512, &prof) == HG_OK);
  hg_profile_info pi;
  EXPECT(hg_profile_info_get(prof, &pi) == HG_OK && fabs(pi.l2_norm - 1.0) < 1e-6);
  hg_profile_free(prof);

  double x[3] = {1, 2, 4}, y[3] = {2, 8, 32};
  hg_power_fit fit;
  EXPECT(hg_fit_power_law(x, y, 3, &fit) == HG_OK && fabs(fit.exponent - 2.0) < 1e-12);
  y[1] = -1;
  EXPECT(hg_fit_power_law(x, y, 3, &fit) == HG_ERR_DOMAIN);

  hg_basis_free(b);
  hg_basis_free(NULL);
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
