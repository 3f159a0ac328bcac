#include <cmath>
#include <limits>
#include <sstream>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"

namespace hgibbs {

DriftPlan make_plan(int M, int N, double K, const Geometry& g) {
  require(K > 0.0, ErrorKind::invalid_argument, "K must be positive");
  DriftPlan plan;
  plan.geometry = g;
  plan.M = M;
  plan.N = N;
  plan.K = K;
  plan.coupling = ou_coupling(M, N, g);
  plan.fhat = profile_projections(M, g, N);
  plan.alpha = alpha(plan.coupling, plan.fhat);
  plan.expected_cost = 0.5 * drift_cost(plan.coupling, plan.fhat, plan.alpha);
  double m = 0.0;
  for (double c : plan.fhat) m += c * c;
  plan.projection_gap = std::max(0.0, 1.0 - m);
  return plan;
}

DriftPlan null_plan(int N, double K, const Geometry& g) {
  g.validate();
  require(N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  require(K > 0.0, ErrorKind::invalid_argument, "K must be positive");
  DriftPlan plan;
  plan.geometry = g;
  plan.N = N;
  plan.K = K;
  plan.null_drift = true;
  plan.coupling.geometry = g;
  plan.coupling.M = 0;
  plan.coupling.N = N;
  plan.coupling.lambdas.resize(N + 1);
  for (int n = 0; n <= N; ++n) plan.coupling.lambdas[n] = eigenvalue(n, g);
  plan.fhat.assign(N + 1, 0.0);
  return plan;
}

namespace {

std::string plan_tag(const DriftPlan& plan) {
  std::ostringstream os;
  os << "d=" << plan.geometry.dim << ",M=" << plan.M << ",N=" << plan.N << ",K=" << plan.K
     << (plan.null_drift ? ",null" : "");
  return os.str();
}

// w = Y_N - Z_M + sqrt(alpha) P_N f_M, returned in x.
void shifted_block(const DriftPlan& plan, const McOptions& opt, std::uint64_t first, Eigen::Index rows, bool with_profile,
                   CoeffBlock& x) {
  CoeffBlock y;
  fill_joint_block(plan.coupling, opt.seed, first, rows, opt.law, y, x);
  if (with_profile && plan.alpha != 0.0) {
    const Eigen::Map<const Eigen::RowVectorXd> f(plan.fhat.data(), plan.N + 1);
    x.re.rowwise() += std::sqrt(plan.alpha) * f;
  }
}

}  // namespace

KeyResult key_probability(const DriftPlan& plan, const McOptions& opt) {
  const double sig = sigma_integral(plan.N, plan.geometry);
  const ChunkLayout layout = opt.layout();
  struct Pair {
    Welford prob, q2;
  };
  auto parts = run_chunks<Pair>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock w;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    shifted_block(plan, opt, layout.first_sample(c), rows, true, w);
    Pair acc;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double q = row_mass(w, r) - sig;
      acc.prob.add(std::abs(q) <= plan.K ? 1.0 : 0.0);
      acc.q2.add(q * q);
    }
    return acc;
  });
  Welford p, q;
  for (const auto& x : parts) {
    p.merge(x.prob);
    q.merge(x.q2);
  }
  KeyResult out;
  out.probability = make_estimate("key_probability[" + plan_tag(plan) + "]", p, opt.seed, layout);
  out.q_second = make_estimate("key_second_moment[" + plan_tag(plan) + "]", q, opt.seed, layout);
  if (!plan.null_drift) out.q_second_exact = lemma_values(plan.coupling, plan.fhat, opt.law).key_second_moment;
  return out;
}

std::vector<std::string> objective_violations(double p, const Geometry& g) { return gns_violations(p, g); }

std::vector<ObjectiveResult> variational_objective(const std::vector<double>& ps, const DriftPlan& plan,
                                                   const EigenBasis& basis, const McOptions& opt) {
  require(!ps.empty(), ErrorKind::invalid_argument, "no exponents given");
  for (double p : ps) {
    const auto v = objective_violations(p, plan.geometry);
    if (!v.empty()) fail(ErrorKind::config, v.front());
  }
  require(basis.geometry == plan.geometry, ErrorKind::shape, "plan and basis geometries differ");
  require(plan.N <= basis.n_max, ErrorKind::shape, "plan N exceeds the basis cutoff");
  const double sig = sigma_integral(plan.N, plan.geometry);
  const ChunkLayout layout = opt.layout();
  const std::size_t P = ps.size();
  struct Acc {
    std::vector<Welford> obj, gain;
    Welford ind;
  };
  auto parts = run_chunks<Acc>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock w;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    shifted_block(plan, opt, layout.first_sample(c), rows, true, w);
    std::vector<Eigen::Index> pass;
    std::vector<char> ok(rows, 0);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (std::abs(row_mass(w, r) - sig) <= plan.K) {
        ok[r] = 1;
        pass.push_back(r);
      }
    }
    Eigen::MatrixXd pw;
    if (!pass.empty()) pw = lp_powers_batch(gather_rows(w, pass), basis, ps);
    Acc acc;
    acc.obj.resize(P);
    acc.gain.resize(P);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      acc.ind.add(ok[r] ? 1.0 : 0.0);
      for (std::size_t k = 0; k < P; ++k) {
        const double g = ok[r] ? pw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) / ps[k] : 0.0;
        acc.gain[k].add(g);
        acc.obj[k].add(plan.expected_cost - g);
      }
      if (ok[r]) ++i;
    }
    return acc;
  });
  std::vector<ObjectiveResult> out(P);
  Welford ind;
  for (const auto& a : parts) ind.merge(a.ind);
  for (std::size_t k = 0; k < P; ++k) {
    Welford o, g;
    for (const auto& a : parts) {
      o.merge(a.obj[k]);
      g.merge(a.gain[k]);
    }
    std::ostringstream tag;
    tag << plan_tag(plan) << ",p=" << ps[k];
    out[k].p = ps[k];
    out[k].objective = make_estimate("objective[" + tag.str() + "]", o, opt.seed, layout);
    out[k].gain = make_estimate("gain[" + tag.str() + "]", g, opt.seed, layout);
    out[k].indicator = make_estimate("key_probability[" + plan_tag(plan) + "]", ind, opt.seed, layout);
    out[k].cost = plan.expected_cost;
  }
  return out;
}

McEstimate remainder_moment(double p, const DriftPlan& plan, const EigenBasis& basis, const McOptions& opt) {
  require(p >= 1.0, ErrorKind::invalid_argument, "p must be >= 1");
  require(plan.N <= basis.n_max, ErrorKind::shape, "plan N exceeds the basis cutoff");
  const ChunkLayout layout = opt.layout();
  auto parts = run_chunks<Welford>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock w;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    shifted_block(plan, opt, layout.first_sample(c), rows, false, w);
    const Eigen::MatrixXd pw = lp_powers_batch(w, basis, {p});
    Welford acc;
    for (Eigen::Index r = 0; r < rows; ++r) acc.add(pw(r, 0) / p);
    return acc;
  });
  std::ostringstream tag;
  tag << "remainder[" << plan_tag(plan) << ",p=" << p << "]";
  return make_estimate(tag.str(), reduce_in_order(parts), opt.seed, layout);
}

ScanReport divergence_scan(const std::vector<double>& ps, const std::vector<int>& M_grid, const Geometry& g,
                           const ScanOptions& opt) {
  require(!M_grid.empty(), ErrorKind::invalid_argument, "empty M grid");
  ScanReport rep;
  for (int M : M_grid) {
    const int N = default_mode_cutoff(M, g, opt.n_factor);
    const EigenBasis basis = build_basis(g, N, default_accuracy(g, N), opt.basis);
    const DriftPlan plan = make_plan(M, N, opt.K, g);
    const auto res = variational_objective(ps, plan, basis, opt.mc);
    for (const auto& r : res) {
      ScanRow row;
      row.p = r.p;
      row.K = opt.K;
      row.M = M;
      row.N = N;
      row.objective_mean = r.objective.mean();
      row.objective_stderr = r.objective.stderr_();
      row.gain_mean = r.gain.mean();
      row.gain_stderr = r.gain.stderr_();
      row.cost = r.cost;
      row.key_prob = r.indicator.mean();
      row.alpha = plan.alpha;
      row.projection_gap = plan.projection_gap;
      row.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
      rep.rows.push_back(row);
    }
  }
  for (double p : ps) {
    ScanFit fit;
    fit.p = p;
    std::vector<double> m, gain, gcorr, cost, mneg, negobj;
    for (const auto& r : rep.rows) {
      if (r.p != p) continue;
      m.push_back(r.M);
      gain.push_back(r.gain_mean);
      gcorr.push_back(r.gain_mean / std::pow(r.alpha, p / 2.0));
      cost.push_back(r.cost);
      if (r.objective_mean < 0.0) {
        mneg.push_back(r.M);
        negobj.push_back(-r.objective_mean);
      }
    }
    if (m.size() >= 3) {
      fit.gain = fit_power_law(m, gain);
      fit.gain_log_corrected = fit_power_law(m, gcorr);
      fit.cost = fit_power_law(m, cost);
    }
    if (mneg.size() >= 3) {
      fit.objective = fit_power_law(mneg, negobj);
      fit.objective_fitted = true;
      for (auto& r : rep.rows)
        if (r.p == p) r.fitted_exponent = fit.objective.exponent;
    }
    rep.fits.push_back(fit);
  }
  return rep;
}

}  // namespace hgibbs
