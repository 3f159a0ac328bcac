/* C interface to the hgibbs library.  All functions return an hg_status;
 * on failure hg_last_error() describes the problem (thread-local). */
#ifndef HGIBBS_H
#define HGIBBS_H

#include <stddef.h>
#include <stdint.h>

#if defined(HGIBBS_BUILDING_DLL)
#define HG_API __attribute__((visibility("default")))
#else
#define HG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HG_OK = 0,
  HG_ERR_INVALID_ARGUMENT = 1,
  HG_ERR_CAPABILITY = 2,
  HG_ERR_RESOLUTION = 3,
  HG_ERR_SHAPE = 4,
  HG_ERR_DOMAIN = 5,
  HG_ERR_UNDEFINED_RATIO = 6,
  HG_ERR_CONTRACT = 7,
  HG_ERR_CONFIG = 8,
  HG_ERR_INTERNAL = 9
} hg_status;

enum { HG_LAW_REAL = 0, HG_LAW_COMPLEX = 1 };

enum {
  HG_STAT_WICK_MASS = 0,
  HG_STAT_WICK_MASS_SQUARED = 1,
  HG_STAT_WICK_INCREMENT_SQUARED = 2,
  HG_STAT_NEGATIVE_SOBOLEV = 3,
  HG_STAT_LP_POWER = 4
};

typedef struct hg_basis hg_basis;
typedef struct hg_plan hg_plan;
typedef struct hg_profile hg_profile;

typedef struct {
  int dim;
  int radial;
} hg_geometry;

typedef struct {
  uint64_t seed;
  uint64_t samples;
  uint64_t chunk_size; /* 0 selects the default */
  int threads;         /* <= 0: GIBBS_THREADS or hardware threads */
  int law;             /* HG_LAW_* */
} hg_mc_options;

typedef struct {
  double mean;
  double std_error; /* NaN below 100 samples */
  double running_max;
  uint64_t n_samples;
  uint64_t seed;
  uint64_t chunks;
  uint64_t chunk_size;
} hg_estimate;

typedef struct {
  int dim;
  int radial;
  int n_max;
  size_t grid_points;
  double extent;
  double max_orthonormality_error;
  double max_eigen_residual;
  int residual_modes;
} hg_basis_report;

typedef struct {
  hg_geometry geometry;
  double p;
  double K;
  int N;
  double r;
  int indicator_inside;
} hg_gibbs_spec;

typedef struct {
  int M;
  int N;
  double nrz0, nrz1, nrz3, nrz5_y, nrz5_z, nrz6;
  double projected_mass;
  double profile_h1;
  double alpha;
  double cost;
  double theta_h1;
  double key_second_moment;
} hg_lemma_values;

typedef struct {
  double lambda, a, var_x, cov_bx, z_second, int_var_x;
} hg_ou_mode;

typedef struct {
  int M;
  int N;
  double K;
  double alpha;
  double expected_cost;
  double projection_gap;
  int null_drift;
} hg_plan_info;

typedef struct {
  double p;
  hg_estimate objective;
  hg_estimate gain;
  hg_estimate indicator;
  double cost;
} hg_objective;

typedef struct {
  double p, K;
  int M, N;
  double objective_mean, objective_stderr;
  double gain_mean, gain_stderr;
  double cost, key_prob, alpha, projection_gap;
  double fitted_exponent;
} hg_scan_row;

typedef struct {
  double exponent;
  double log_prefactor;
  double r_squared;
} hg_power_fit;

typedef struct {
  double p;
  int objective_fitted;
  hg_power_fit objective, gain, gain_log_corrected, cost;
} hg_scan_fit;

typedef struct {
  double M;
  double l2_norm;
  double projected_mass;
  double spectral_h1; /* sum lambda_n^2 |<f_M,h_n>|^2 */
  double frequency_second_moment;
  size_t grid_points;
} hg_profile_info;

HG_API const char* hg_version(void);
HG_API const char* hg_last_error(void);
HG_API const char* hg_status_name(hg_status s);

/* Geometry and basis */
HG_API hg_status hg_geometry_check(hg_geometry g, char* buf, size_t buflen);
HG_API hg_status hg_eigenvalue(int n, hg_geometry g, double* out);
HG_API hg_status hg_eval_eigenfunction(int n, double x, hg_geometry g, double* out);
HG_API hg_status hg_basis_build(hg_geometry g, int n_max, double accuracy, hg_basis** out);
HG_API void hg_basis_free(hg_basis* b);
HG_API hg_status hg_basis_default_accuracy(hg_geometry g, int n_max, double* out);
HG_API hg_status hg_basis_verify(const hg_basis* b, int residual_modes, hg_basis_report* out);
HG_API hg_status hg_basis_grid_size(const hg_basis* b, size_t* out);
HG_API hg_status hg_basis_grid(const hg_basis* b, double* nodes, double* weights, size_t len);
HG_API hg_status hg_basis_project(const hg_basis* b, const double* f, size_t len, double* out, size_t out_len);
HG_API hg_status hg_eigen_lp_norm(const hg_basis* b, int n, double p, double* out);

/* Gaussian field */
HG_API hg_status hg_sigma_integral(int N, hg_geometry g, double* out);
HG_API hg_status hg_wick_second_moment(int N, hg_geometry g, int law, double* out);
HG_API hg_status hg_field_moment(int stat, int N, int N2, double param, hg_geometry g, const hg_basis* basis,
                                 const hg_mc_options* opt, hg_estimate* out, double* exact, int* has_exact);

/* Gibbs measure */
HG_API hg_status hg_gibbs_check(const hg_gibbs_spec* spec, char* buf, size_t buflen);
HG_API hg_status hg_estimate_partition(const hg_gibbs_spec* spec, const hg_basis* basis, const hg_mc_options* opt,
                                       hg_estimate* out);
HG_API hg_status hg_density_moment(const hg_gibbs_spec* spec, const hg_basis* basis, double r_power,
                                   const hg_mc_options* opt, hg_estimate* out);
HG_API hg_status hg_potential_expectation(const hg_gibbs_spec* spec, const hg_basis* basis,
                                          const hg_mc_options* opt, hg_estimate* out);
HG_API hg_status hg_exact_partition_n0(const hg_gibbs_spec* spec, int law, double* out);
HG_API hg_status hg_boundary_ratio(int N, double K, double eps_narrow, double eps_wide, hg_geometry g,
                                   const hg_mc_options* opt, hg_estimate* narrow, hg_estimate* wide, double* ratio,
                                   double* ratio_stderr);
HG_API hg_status hg_tail_set_probability(int N, double K, double p, int tail_cut, const hg_basis* basis,
                                         const hg_mc_options* opt, hg_estimate* out, double* neglected_variance);

/* Blow-up profile, OU coupling and drift */
HG_API hg_status hg_default_mode_cutoff(int M, hg_geometry g, double factor, int* out);
HG_API hg_status hg_profile_build(double M, hg_geometry g, int N, hg_profile** out);
HG_API void hg_profile_free(hg_profile* p);
HG_API hg_status hg_profile_info_get(const hg_profile* p, hg_profile_info* out);
HG_API hg_status hg_profile_lp_power(const hg_profile* p, double exponent, double* out);
HG_API hg_status hg_ou_mode_get(int M, int N, int n, hg_geometry g, hg_ou_mode* out);
HG_API hg_status hg_lemma_values_get(int M, int N, hg_geometry g, int law, hg_lemma_values* out);
/* Normalized lemma ratio i in [0, 6) with its regression interval. */
HG_API hg_status hg_lemma_ratio(const hg_lemma_values* v, int i, double* value, const char** name, double* lo,
                                double* hi);
HG_API hg_status hg_plan_create(int M, int N, double K, hg_geometry g, hg_plan** out);
HG_API hg_status hg_plan_null(int N, double K, hg_geometry g, hg_plan** out);
HG_API void hg_plan_free(hg_plan* p);
HG_API hg_status hg_plan_info_get(const hg_plan* p, hg_plan_info* out);
HG_API hg_status hg_key_probability(const hg_plan* p, const hg_mc_options* opt, hg_estimate* prob,
                                    hg_estimate* q_second, double* q_second_exact);
HG_API hg_status hg_variational_objective(const hg_plan* p, const hg_basis* basis, const double* ps, size_t np,
                                          const hg_mc_options* opt, hg_objective* out);
HG_API hg_status hg_remainder_moment(const hg_plan* p, const hg_basis* basis, double exponent,
                                     const hg_mc_options* opt, hg_estimate* out);
/* rows must hold np * nM entries, fits np entries. */
HG_API hg_status hg_divergence_scan(const double* ps, size_t np, const int* Ms, size_t nM, hg_geometry g, double K,
                                    double n_factor, const hg_mc_options* opt, hg_scan_row* rows,
                                    hg_scan_fit* fits);

HG_API hg_status hg_fit_power_law(const double* x, const double* y, size_t n, hg_power_fit* out);

#ifdef __cplusplus
}
#endif

#endif /* HGIBBS_H */
