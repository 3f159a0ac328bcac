#include "hgibbs/gibbs_measure.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hgibbs/errors.hpp"
#include "hgibbs/quadrature.hpp"

namespace hgibbs {

std::vector<std::string> GibbsSpec::violations() const {
  std::vector<std::string> v = geometry.violations();
  if (!(p > 2.0)) v.push_back("p must be > 2 (got " + std::to_string(p) + ")");
  if (auto lim = geometry.sobolev_limit(); lim && !(p < *lim))
    v.push_back("p must be < 2d/(d-2) = " + std::to_string(*lim) + " for d = " + std::to_string(geometry.dim) +
                " (got " + std::to_string(p) + ")");
  if (!(K > 0.0)) v.push_back("K must be > 0");
  if (N < 0) v.push_back("N must be >= 0");
  if (!(r >= 0.0)) v.push_back("r must be >= 0");
  return v;
}

void GibbsSpec::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid Gibbs specification:";
  for (const auto& s : v) msg += " " + s + ";";
  fail(ErrorKind::config, msg);
}

std::string GibbsSpec::describe() const {
  std::ostringstream os;
  os << "d=" << geometry.dim << (geometry.radial ? "r" : "") << ",p=" << p << ",K=" << K << ",N=" << N
     << ",r=" << r << (placement == IndicatorPlacement::inside ? ",inside" : "");
  return os.str();
}

double h0_lp_power(double p, const Geometry& g) {
  const double d = g.dim;
  return std::pow(std::numbers::pi, -p * d / 4.0) * std::pow(2.0 * std::numbers::pi / p, d / 2.0);
}

namespace {

std::vector<double> lambdas_upto(int N, const Geometry& g) {
  std::vector<double> lam(N + 1);
  for (int n = 0; n <= N; ++n) lam[n] = eigenvalue(n, g);
  return lam;
}

enum class Integrand { density, potential };

McEstimate run_gibbs(const GibbsSpec& spec, const EigenBasis& basis, const McOptions& opt, Integrand kind,
                     const std::string& id) {
  spec.validate();
  require(spec.geometry == basis.geometry, ErrorKind::shape, "spec and basis geometries differ");
  require(spec.N <= basis.n_max, ErrorKind::shape, "N exceeds the basis cutoff");
  const auto lam = lambdas_upto(spec.N, spec.geometry);
  const double sig = sigma_integral(spec.N, spec.geometry);
  const ChunkLayout layout = opt.layout();
  const bool need_norm = kind == Integrand::potential || spec.r != 0.0;

  auto parts = run_chunks<Welford>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock blk;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    fill_field_block(opt.seed, layout.first_sample(c), rows, spec.N, opt.law, lam.data(), blk);
    std::vector<Eigen::Index> pass;
    std::vector<char> ok(rows, 0);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (std::abs(row_mass(blk, r) - sig) <= spec.K) {
        ok[r] = 1;
        pass.push_back(r);
      }
    }
    std::vector<double> val(rows, 0.0);
    if (need_norm && !pass.empty()) {
      const Eigen::MatrixXd pw = lp_powers_batch(gather_rows(blk, pass), basis, {spec.p});
      for (std::size_t i = 0; i < pass.size(); ++i) val[pass[i]] = spec.r / spec.p * pw(static_cast<Eigen::Index>(i), 0);
    }
    Welford acc;
    for (Eigen::Index r = 0; r < rows; ++r) {
      double x;
      if (kind == Integrand::potential) {
        x = ok[r] ? val[r] : 0.0;
      } else if (spec.placement == IndicatorPlacement::outside) {
        x = ok[r] ? std::exp(val[r]) : 0.0;
      } else {
        x = std::exp(ok[r] ? val[r] : 0.0);
      }
      acc.add(x);
    }
    return acc;
  });
  return make_estimate(id, reduce_in_order(parts), opt.seed, layout);
}

}  // namespace

McEstimate estimate_partition(const GibbsSpec& spec, const EigenBasis& basis, const McOptions& opt) {
  return run_gibbs(spec, basis, opt, Integrand::density, "partition[" + spec.describe() + "]");
}

McEstimate density_moment(const GibbsSpec& spec, const EigenBasis& basis, double r_power, const McOptions& opt) {
  GibbsSpec s = spec;
  s.r = r_power;
  return run_gibbs(s, basis, opt, Integrand::density, "partition[" + s.describe() + "]");
}

McEstimate potential_expectation(const GibbsSpec& spec, const EigenBasis& basis, const McOptions& opt) {
  return run_gibbs(spec, basis, opt, Integrand::potential, "potential[" + spec.describe() + "]");
}

double exact_partition_n0(const GibbsSpec& spec, GaussianLaw law) {
  spec.validate();
  require(spec.N == 0, ErrorKind::invalid_argument, "exact_partition_n0 needs N = 0");
  const double lam0 = eigenvalue(0, spec.geometry);
  const double c = spec.r / spec.p * h0_lp_power(spec.p, spec.geometry) / std::pow(lam0, spec.p);
  // |g_0|^2 ranges over [t_lo, t_hi] on the event |W| <= K.
  const double shift = 1.0 / (lam0 * lam0);
  const double t_lo = std::max(0.0, lam0 * lam0 * (shift - spec.K));
  const double t_hi = lam0 * lam0 * (shift + spec.K);
  const bool inside = spec.placement == IndicatorPlacement::inside;
  constexpr double tol = 1e-8;

  if (law == GaussianLaw::real) {
    const double g_lo = std::sqrt(t_lo), g_hi = std::sqrt(t_hi);
    const double p_event = std::erf(g_hi / std::sqrt(2.0)) - std::erf(g_lo / std::sqrt(2.0));
    double val;
    if (c == 0.0) {
      val = p_event;
    } else {
      auto f = [&](double g) {
        return 2.0 * std::exp(-0.5 * g * g + c * std::pow(g, spec.p)) / std::sqrt(2.0 * std::numbers::pi);
      };
      val = integrate_adaptive(f, g_lo, g_hi, tol);
    }
    return inside ? val + (1.0 - p_event) : val;
  }
  const double p_event = std::exp(-t_lo) - std::exp(-t_hi);
  double val;
  if (c == 0.0) {
    val = p_event;
  } else {
    auto f = [&](double t) { return std::exp(-t + c * std::pow(t, spec.p / 2.0)); };
    val = integrate_adaptive(f, t_lo, t_hi, tol);
  }
  return inside ? val + (1.0 - p_event) : val;
}

BoundaryRatio boundary_ratio(int N, double K, double eps_narrow, double eps_wide, const Geometry& g,
                             const McOptions& opt) {
  g.validate();
  require(N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  require(eps_narrow > 0.0 && eps_wide >= eps_narrow, ErrorKind::invalid_argument,
          "need 0 < eps_narrow <= eps_wide");
  const auto lam = lambdas_upto(N, g);
  const double sig = sigma_integral(N, g);
  const ChunkLayout layout = opt.layout();
  struct Pair {
    Welford narrow, wide;
  };
  auto parts = run_chunks<Pair>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock blk;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    fill_field_block(opt.seed, layout.first_sample(c), rows, N, opt.law, lam.data(), blk);
    Pair acc;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double dist = std::abs(row_mass(blk, r) - sig - K);
      acc.narrow.add(dist <= eps_narrow ? 1.0 : 0.0);
      acc.wide.add(dist <= eps_wide ? 1.0 : 0.0);
    }
    return acc;
  });
  Welford nw, ww;
  for (const auto& p : parts) {
    nw.merge(p.narrow);
    ww.merge(p.wide);
  }
  std::ostringstream tag;
  tag << "boundary[N=" << N << ",K=" << K << ",d=" << g.dim << ",eps=";
  BoundaryRatio out;
  out.narrow = make_estimate(tag.str() + std::to_string(eps_narrow) + "]", nw, opt.seed, layout);
  out.wide = make_estimate(tag.str() + std::to_string(eps_wide) + "]", ww, opt.seed, layout);
  out.expected = eps_narrow / eps_wide;
  const double hits = ww.mean * static_cast<double>(ww.count);
  if (hits > 0.0) {
    out.ratio = nw.mean / ww.mean;
    out.ratio_stderr = std::sqrt(out.ratio * (1.0 - out.ratio) / hits);
  } else {
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.ratio_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

McEstimate boundary_probability(int N, double K, double eps, const Geometry& g, const McOptions& opt) {
  require(eps > 0.0, ErrorKind::invalid_argument, "eps must be positive");
  return boundary_ratio(N, K, eps, eps, g, opt).narrow;
}

McEstimate tail_set_probability(int N, double K, double p, int tail_cut, const EigenBasis& basis,
                                const McOptions& opt) {
  const Geometry& g = basis.geometry;
  require(N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  require(tail_cut > N, ErrorKind::invalid_argument, "tail_cut must exceed N");
  require(tail_cut <= basis.n_max, ErrorKind::shape, "tail_cut exceeds the basis cutoff");
  require(K > 0.0 && p >= 1.0, ErrorKind::invalid_argument, "need K > 0 and p >= 1");
  const auto lam = lambdas_upto(tail_cut, g);
  const double tail_sigma = sigma_integral(tail_cut, g) - sigma_integral(N, g);
  const ChunkLayout layout = opt.layout();
  auto parts = run_chunks<Welford>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock blk;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    fill_field_block(opt.seed, layout.first_sample(c), rows, tail_cut, opt.law, lam.data(), blk);
    blk.re.leftCols(N + 1).setZero();
    if (blk.complex()) blk.im.leftCols(N + 1).setZero();
    std::vector<Eigen::Index> pass;
    for (Eigen::Index r = 0; r < rows; ++r)
      if (std::abs(row_mass(blk, r) - tail_sigma) <= 0.5 * K) pass.push_back(r);
    Welford acc;
    std::size_t hits = 0;
    if (!pass.empty()) {
      const Eigen::MatrixXd pw = lp_powers_batch(gather_rows(blk, pass), basis, {p});
      for (Eigen::Index i = 0; i < pw.rows(); ++i)
        if (pw(i, 0) / p <= 1.0) ++hits;
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(rows); ++i) acc.add(i < hits ? 1.0 : 0.0);
    return acc;
  });
  std::ostringstream tag;
  tag << "tailset[N=" << N << ",T=" << tail_cut << ",K=" << K << ",p=" << p << ",d=" << g.dim << "]";
  return make_estimate(tag.str(), reduce_in_order(parts), opt.seed, layout);
}

double tail_neglected_variance(int tail_cut, const Geometry& g, GaussianLaw law) {
  // sum_{n>T} (c n + d)^{-2} by the midpoint approximation of its integral.
  const double slope = (g.dim == 1 && !g.radial) ? 2.0 : 4.0;
  const double off = (g.dim == 1 && !g.radial) ? 1.0 : g.dim;
  const double x0 = tail_cut + 0.5;
  return chaos_constant(law) / (slope * (slope * x0 + off));
}

}  // namespace hgibbs
