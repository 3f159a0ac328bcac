#include <cstring>
#include <new>
#include <string>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"
#include "hgibbs/gibbs_measure.hpp"
#include "hgibbs/hgibbs.h"

struct hg_basis {
  hgibbs::EigenBasis impl;
};
struct hg_plan {
  hgibbs::DriftPlan impl;
};
struct hg_profile {
  hgibbs::ProfileFM impl;
};

namespace {

thread_local std::string g_last_error;

hg_status status_of(hgibbs::ErrorKind k) {
  using hgibbs::ErrorKind;
  switch (k) {
    case ErrorKind::invalid_argument: return HG_ERR_INVALID_ARGUMENT;
    case ErrorKind::capability: return HG_ERR_CAPABILITY;
    case ErrorKind::resolution: return HG_ERR_RESOLUTION;
    case ErrorKind::shape: return HG_ERR_SHAPE;
    case ErrorKind::domain: return HG_ERR_DOMAIN;
    case ErrorKind::undefined_ratio: return HG_ERR_UNDEFINED_RATIO;
    case ErrorKind::contract: return HG_ERR_CONTRACT;
    case ErrorKind::config: return HG_ERR_CONFIG;
  }
  return HG_ERR_INTERNAL;
}

template <class F>
hg_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return HG_OK;
  } catch (const hgibbs::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HG_ERR_RESOLUTION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) hgibbs::fail(hgibbs::ErrorKind::invalid_argument, std::string("null pointer: ") + what);
}

hgibbs::Geometry geom(hg_geometry g) { return {g.dim, g.radial != 0}; }

hgibbs::GaussianLaw law_of(int law) {
  if (law == HG_LAW_REAL) return hgibbs::GaussianLaw::real;
  if (law == HG_LAW_COMPLEX) return hgibbs::GaussianLaw::circular_complex;
  hgibbs::fail(hgibbs::ErrorKind::invalid_argument, "unknown law code " + std::to_string(law));
}

hgibbs::McOptions mc(const hg_mc_options* o) {
  need(o, "options");
  hgibbs::McOptions m;
  m.seed = o->seed;
  m.samples = o->samples;
  if (o->chunk_size > 0) m.chunk_size = o->chunk_size;
  m.threads = o->threads;
  m.law = law_of(o->law);
  return m;
}

hg_estimate to_c(const hgibbs::McEstimate& e) {
  return {e.mean(), e.stderr_(), e.running_max(), e.n_samples(), e.seed, e.chunks, e.chunk_size};
}

hgibbs::GibbsSpec spec_of(const hg_gibbs_spec* s) {
  need(s, "spec");
  hgibbs::GibbsSpec g;
  g.geometry = geom(s->geometry);
  g.p = s->p;
  g.K = s->K;
  g.N = s->N;
  g.r = s->r;
  g.placement = s->indicator_inside ? hgibbs::IndicatorPlacement::inside : hgibbs::IndicatorPlacement::outside;
  return g;
}

hg_power_fit to_c(const hgibbs::PowerFit& f) { return {f.exponent, f.log_prefactor, f.r_squared}; }

// Joins violations into buf; returns HG_ERR_CONFIG when any exist.
hg_status report_violations(const std::vector<std::string>& v, char* buf, size_t buflen) {
  std::string joined;
  for (const auto& s : v) {
    if (!joined.empty()) joined += '\n';
    joined += s;
  }
  if (buf && buflen > 0) {
    std::strncpy(buf, joined.c_str(), buflen - 1);
    buf[buflen - 1] = '\0';
  }
  if (v.empty()) return HG_OK;
  g_last_error = joined;
  return HG_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* hg_version(void) { return HGIBBS_VERSION_STRING; }
const char* hg_last_error(void) { return g_last_error.c_str(); }

const char* hg_status_name(hg_status s) {
  switch (s) {
    case HG_OK: return "ok";
    case HG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case HG_ERR_CAPABILITY: return "capability";
    case HG_ERR_RESOLUTION: return "resolution";
    case HG_ERR_SHAPE: return "shape";
    case HG_ERR_DOMAIN: return "domain";
    case HG_ERR_UNDEFINED_RATIO: return "undefined_ratio";
    case HG_ERR_CONTRACT: return "contract";
    case HG_ERR_CONFIG: return "config";
    case HG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

hg_status hg_geometry_check(hg_geometry g, char* buf, size_t buflen) {
  return report_violations(geom(g).violations(), buf, buflen);
}

hg_status hg_eigenvalue(int n, hg_geometry g, double* out) {
  return guard([&] {
    need(out, "out");
    geom(g).validate();
    *out = hgibbs::eigenvalue(n, geom(g));
  });
}

hg_status hg_eval_eigenfunction(int n, double x, hg_geometry g, double* out) {
  return guard([&] {
    need(out, "out");
    *out = hgibbs::eval_eigenfunction(n, x, geom(g));
  });
}

hg_status hg_basis_build(hg_geometry g, int n_max, double accuracy, hg_basis** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto* b = new hg_basis{hgibbs::build_basis(geom(g), n_max, accuracy)};
    *out = b;
  });
}

void hg_basis_free(hg_basis* b) { delete b; }

hg_status hg_basis_default_accuracy(hg_geometry g, int n_max, double* out) {
  return guard([&] {
    need(out, "out");
    *out = hgibbs::default_accuracy(geom(g), n_max);
  });
}

hg_status hg_basis_verify(const hg_basis* b, int residual_modes, hg_basis_report* out) {
  return guard([&] {
    need(b, "basis");
    need(out, "out");
    const auto r = hgibbs::verify_basis(b->impl, residual_modes);
    *out = {r.dim, r.radial ? 1 : 0, r.n_max, r.grid_points, r.extent, r.max_orthonormality_error,
            r.max_eigen_residual, r.residual_modes};
  });
}

hg_status hg_basis_grid_size(const hg_basis* b, size_t* out) {
  return guard([&] {
    need(b, "basis");
    need(out, "out");
    *out = b->impl.grid.size();
  });
}

hg_status hg_basis_grid(const hg_basis* b, double* nodes, double* weights, size_t len) {
  return guard([&] {
    need(b, "basis");
    hgibbs::require(len == b->impl.grid.size(), hgibbs::ErrorKind::shape, "grid length mismatch");
    if (nodes) std::memcpy(nodes, b->impl.grid.nodes.data(), len * sizeof(double));
    if (weights) std::memcpy(weights, b->impl.grid.weights.data(), len * sizeof(double));
  });
}

hg_status hg_basis_project(const hg_basis* b, const double* f, size_t len, double* out, size_t out_len) {
  return guard([&] {
    need(b, "basis");
    need(f, "f");
    need(out, "out");
    hgibbs::require(out_len == static_cast<size_t>(b->impl.n_max + 1), hgibbs::ErrorKind::shape,
                    "output must hold n_max + 1 coefficients");
    const auto c = hgibbs::project(std::vector<double>(f, f + len), b->impl);
    std::memcpy(out, c.data(), c.size() * sizeof(double));
  });
}

hg_status hg_eigen_lp_norm(const hg_basis* b, int n, double p, double* out) {
  return guard([&] {
    need(b, "basis");
    need(out, "out");
    *out = hgibbs::eigen_lp_norm(n, p, b->impl);
  });
}

hg_status hg_sigma_integral(int N, hg_geometry g, double* out) {
  return guard([&] {
    need(out, "out");
    geom(g).validate();
    *out = hgibbs::sigma_integral(N, geom(g));
  });
}

hg_status hg_wick_second_moment(int N, hg_geometry g, int law, double* out) {
  return guard([&] {
    need(out, "out");
    geom(g).validate();
    *out = hgibbs::wick_second_moment_exact(N, geom(g), law_of(law));
  });
}

hg_status hg_field_moment(int stat, int N, int N2, double param, hg_geometry g, const hg_basis* basis,
                          const hg_mc_options* opt, hg_estimate* out, double* exact, int* has_exact) {
  return guard([&] {
    need(out, "out");
    hgibbs::require(stat >= HG_STAT_WICK_MASS && stat <= HG_STAT_LP_POWER, hgibbs::ErrorKind::invalid_argument,
                    "unknown statistic");
    hgibbs::FieldMomentRequest req;
    req.stat = static_cast<hgibbs::FieldStatistic>(stat);
    req.N = N;
    req.N2 = N2;
    req.param = param;
    const auto m = mc(opt);
    *out = to_c(hgibbs::field_moment(req, geom(g), basis ? &basis->impl : nullptr, m));
    const auto ex = hgibbs::field_moment_exact(req, geom(g), m.law);
    if (has_exact) *has_exact = ex.has_value() ? 1 : 0;
    if (exact) *exact = ex.value_or(0.0);
  });
}

hg_status hg_gibbs_check(const hg_gibbs_spec* spec, char* buf, size_t buflen) {
  if (!spec) {
    g_last_error = "null pointer: spec";
    return HG_ERR_INVALID_ARGUMENT;
  }
  return report_violations(spec_of(spec).violations(), buf, buflen);
}

hg_status hg_estimate_partition(const hg_gibbs_spec* spec, const hg_basis* basis, const hg_mc_options* opt,
                                hg_estimate* out) {
  return guard([&] {
    need(basis, "basis");
    need(out, "out");
    *out = to_c(hgibbs::estimate_partition(spec_of(spec), basis->impl, mc(opt)));
  });
}

hg_status hg_density_moment(const hg_gibbs_spec* spec, const hg_basis* basis, double r_power,
                            const hg_mc_options* opt, hg_estimate* out) {
  return guard([&] {
    need(basis, "basis");
    need(out, "out");
    *out = to_c(hgibbs::density_moment(spec_of(spec), basis->impl, r_power, mc(opt)));
  });
}

hg_status hg_potential_expectation(const hg_gibbs_spec* spec, const hg_basis* basis, const hg_mc_options* opt,
                                   hg_estimate* out) {
  return guard([&] {
    need(basis, "basis");
    need(out, "out");
    *out = to_c(hgibbs::potential_expectation(spec_of(spec), basis->impl, mc(opt)));
  });
}

hg_status hg_exact_partition_n0(const hg_gibbs_spec* spec, int law, double* out) {
  return guard([&] {
    need(out, "out");
    *out = hgibbs::exact_partition_n0(spec_of(spec), law_of(law));
  });
}

hg_status hg_boundary_ratio(int N, double K, double eps_narrow, double eps_wide, hg_geometry g,
                            const hg_mc_options* opt, hg_estimate* narrow, hg_estimate* wide, double* ratio,
                            double* ratio_stderr) {
  return guard([&] {
    const auto r = hgibbs::boundary_ratio(N, K, eps_narrow, eps_wide, geom(g), mc(opt));
    if (narrow) *narrow = to_c(r.narrow);
    if (wide) *wide = to_c(r.wide);
    if (ratio) *ratio = r.ratio;
    if (ratio_stderr) *ratio_stderr = r.ratio_stderr;
  });
}

hg_status hg_tail_set_probability(int N, double K, double p, int tail_cut, const hg_basis* basis,
                                  const hg_mc_options* opt, hg_estimate* out, double* neglected_variance) {
  return guard([&] {
    need(basis, "basis");
    need(out, "out");
    const auto m = mc(opt);
    *out = to_c(hgibbs::tail_set_probability(N, K, p, tail_cut, basis->impl, m));
    if (neglected_variance)
      *neglected_variance = hgibbs::tail_neglected_variance(tail_cut, basis->impl.geometry, m.law);
  });
}

hg_status hg_default_mode_cutoff(int M, hg_geometry g, double factor, int* out) {
  return guard([&] {
    need(out, "out");
    geom(g).validate();
    *out = hgibbs::default_mode_cutoff(M, geom(g), factor);
  });
}

hg_status hg_profile_build(double M, hg_geometry g, int N, hg_profile** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    const auto grid = hgibbs::profile_grid(M, geom(g), N);
    *out = new hg_profile{hgibbs::build_profile(M, grid, N)};
  });
}

void hg_profile_free(hg_profile* p) { delete p; }

hg_status hg_profile_info_get(const hg_profile* p, hg_profile_info* out) {
  return guard([&] {
    need(p, "profile");
    need(out, "out");
    const auto& f = p->impl;
    *out = {f.M, f.l2_norm, f.projected_mass(), f.spectral_sobolev(1.0), f.f.frequency_second_moment(),
            f.grid.size()};
  });
}

hg_status hg_profile_lp_power(const hg_profile* p, double exponent, double* out) {
  return guard([&] {
    need(p, "profile");
    need(out, "out");
    hgibbs::require(exponent > 0.0, hgibbs::ErrorKind::invalid_argument, "exponent must be positive");
    *out = p->impl.lp_power(exponent);
  });
}

hg_status hg_ou_mode_get(int M, int N, int n, hg_geometry g, hg_ou_mode* out) {
  return guard([&] {
    need(out, "out");
    const auto c = hgibbs::ou_coupling(M, N, geom(g));
    hgibbs::require(n >= 0 && n < c.coupled_modes(), hgibbs::ErrorKind::invalid_argument, "mode not coupled");
    const auto& m = c.modes[n];
    *out = {m.lambda, m.a, m.var_x, m.cov_bx, m.z_second, m.int_var_x};
  });
}

hg_status hg_lemma_values_get(int M, int N, hg_geometry g, int law, hg_lemma_values* out) {
  return guard([&] {
    need(out, "out");
    const auto c = hgibbs::ou_coupling(M, N, geom(g));
    const auto f = hgibbs::profile_projections(M, geom(g), N);
    const auto v = hgibbs::lemma_values(c, f, law_of(law));
    *out = {v.M,     v.N,     v.nrz0,           v.nrz1,       v.nrz3,  v.nrz5_y, v.nrz5_z,
            v.nrz6,  v.projected_mass, v.profile_h1, v.alpha, v.cost,   v.theta_h1, v.key_second_moment};
  });
}

hg_status hg_lemma_ratio(const hg_lemma_values* v, int i, double* value, const char** name, double* lo,
                         double* hi) {
  return guard([&] {
    need(v, "values");
    hgibbs::require(i >= 0 && i < 6, hgibbs::ErrorKind::invalid_argument, "ratio index out of range");
    hgibbs::LemmaValues lv;
    lv.M = v->M;
    lv.N = v->N;
    lv.nrz0 = v->nrz0;
    lv.nrz1 = v->nrz1;
    lv.nrz3 = v->nrz3;
    lv.nrz5_y = v->nrz5_y;
    lv.nrz5_z = v->nrz5_z;
    lv.nrz6 = v->nrz6;
    lv.cost = v->cost;
    const auto r = hgibbs::lemma_ratios(lv);
    const auto& b = hgibbs::kLemmaRatioBounds[i];
    if (value) *value = r[i];
    if (name) *name = b.name;
    if (lo) *lo = b.lo;
    if (hi) *hi = b.hi;
  });
}

hg_status hg_plan_create(int M, int N, double K, hg_geometry g, hg_plan** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    *out = new hg_plan{hgibbs::make_plan(M, N, K, geom(g))};
  });
}

hg_status hg_plan_null(int N, double K, hg_geometry g, hg_plan** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    *out = new hg_plan{hgibbs::null_plan(N, K, geom(g))};
  });
}

void hg_plan_free(hg_plan* p) { delete p; }

hg_status hg_plan_info_get(const hg_plan* p, hg_plan_info* out) {
  return guard([&] {
    need(p, "plan");
    need(out, "out");
    const auto& d = p->impl;
    *out = {d.M, d.N, d.K, d.alpha, d.expected_cost, d.projection_gap, d.null_drift ? 1 : 0};
  });
}

hg_status hg_key_probability(const hg_plan* p, const hg_mc_options* opt, hg_estimate* prob, hg_estimate* q_second,
                             double* q_second_exact) {
  return guard([&] {
    need(p, "plan");
    const auto r = hgibbs::key_probability(p->impl, mc(opt));
    if (prob) *prob = to_c(r.probability);
    if (q_second) *q_second = to_c(r.q_second);
    if (q_second_exact) *q_second_exact = r.q_second_exact;
  });
}

hg_status hg_variational_objective(const hg_plan* p, const hg_basis* basis, const double* ps, size_t np,
                                   const hg_mc_options* opt, hg_objective* out) {
  return guard([&] {
    need(p, "plan");
    need(basis, "basis");
    need(ps, "ps");
    need(out, "out");
    const auto res = hgibbs::variational_objective(std::vector<double>(ps, ps + np), p->impl, basis->impl, mc(opt));
    for (size_t k = 0; k < res.size(); ++k)
      out[k] = {res[k].p, to_c(res[k].objective), to_c(res[k].gain), to_c(res[k].indicator), res[k].cost};
  });
}

hg_status hg_remainder_moment(const hg_plan* p, const hg_basis* basis, double exponent, const hg_mc_options* opt,
                              hg_estimate* out) {
  return guard([&] {
    need(p, "plan");
    need(basis, "basis");
    need(out, "out");
    *out = to_c(hgibbs::remainder_moment(exponent, p->impl, basis->impl, mc(opt)));
  });
}

hg_status hg_divergence_scan(const double* ps, size_t np, const int* Ms, size_t nM, hg_geometry g, double K,
                             double n_factor, const hg_mc_options* opt, hg_scan_row* rows, hg_scan_fit* fits) {
  return guard([&] {
    need(ps, "ps");
    need(Ms, "Ms");
    need(rows, "rows");
    hgibbs::ScanOptions so;
    so.K = K;
    so.n_factor = n_factor;
    so.mc = mc(opt);
    const auto rep =
        hgibbs::divergence_scan(std::vector<double>(ps, ps + np), std::vector<int>(Ms, Ms + nM), geom(g), so);
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      rows[i] = {r.p,         r.K,        r.M,     r.N,          r.objective_mean, r.objective_stderr, r.gain_mean,
                 r.gain_stderr, r.cost, r.key_prob, r.alpha, r.projection_gap, r.fitted_exponent};
    }
    if (fits) {
      for (size_t k = 0; k < rep.fits.size(); ++k) {
        const auto& f = rep.fits[k];
        fits[k] = {f.p, f.objective_fitted ? 1 : 0, to_c(f.objective), to_c(f.gain), to_c(f.gain_log_corrected),
                   to_c(f.cost)};
      }
    }
  });
}

hg_status hg_fit_power_law(const double* x, const double* y, size_t n, hg_power_fit* out) {
  return guard([&] {
    need(x, "x");
    need(y, "y");
    need(out, "out");
    *out = to_c(hgibbs::fit_power_law(std::vector<double>(x, x + n), std::vector<double>(y, y + n)));
  });
}

}  // extern "C"
