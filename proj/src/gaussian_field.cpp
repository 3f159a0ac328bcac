#include "hgibbs/gaussian_field.hpp"

#include <cmath>

#include "hgibbs/errors.hpp"

namespace hgibbs {

double chaos_constant(GaussianLaw law) { return law == GaussianLaw::real ? 2.0 : 1.0; }

const char* to_string(GaussianLaw law) { return law == GaussianLaw::real ? "real" : "circular_complex"; }

GaussianLaw parse_law(const std::string& s) {
  if (s == "real") return GaussianLaw::real;
  if (s == "circular_complex" || s == "complex") return GaussianLaw::circular_complex;
  fail(ErrorKind::config, "unknown gaussian law '" + s + "' (expected real or circular_complex)");
}

FieldCoeffs FieldCoeffs::deterministic(const Geometry& g, std::vector<std::complex<double>> c) {
  g.validate();
  require(!c.empty(), ErrorKind::invalid_argument, "field needs at least one coefficient");
  for (const auto& v : c)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::domain, "non-finite coefficient");
  FieldCoeffs f;
  f.geometry = g;
  f.n_cut = static_cast<int>(c.size()) - 1;
  f.coeffs = std::move(c);
  return f;
}

FieldCoeffs FieldCoeffs::zero(const Geometry& g, int n_cut) {
  require(n_cut >= 0, ErrorKind::invalid_argument, "n_cut must be nonnegative");
  return deterministic(g, std::vector<std::complex<double>>(n_cut + 1));
}

FieldCoeffs FieldCoeffs::mode(const Geometry& g, int n_cut, int n, std::complex<double> amp) {
  require(n >= 0 && n <= n_cut, ErrorKind::invalid_argument, "mode outside the truncation");
  FieldCoeffs f = zero(g, n_cut);
  f.coeffs[n] = amp;
  return f;
}

double FieldCoeffs::l2_squared() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return s;
}

void draw_gaussians(RngStream& stream, GaussianLaw law, int count, std::complex<double>* out) {
  if (law == GaussianLaw::real) {
    for (int n = 0; n < count; ++n) out[n] = stream.normal();
  } else {
    const double s = std::sqrt(0.5);
    for (int n = 0; n < count; ++n) {
      const double a = stream.normal();
      const double b = stream.normal();
      out[n] = {s * a, s * b};
    }
  }
}

FieldCoeffs sample_field(const Geometry& g, int N, RngStream& stream, GaussianLaw law) {
  g.validate();
  require(N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  FieldCoeffs f;
  f.geometry = g;
  f.n_cut = N;
  f.provenance = {true, stream.root_seed(), stream.stream_id(), stream.position() >> 32, law};
  f.coeffs.resize(N + 1);
  draw_gaussians(stream, law, N + 1, f.coeffs.data());
  for (int n = 0; n <= N; ++n) f.coeffs[n] /= eigenvalue(n, g);
  return f;
}

FieldCoeffs sample_field(const EigenBasis& basis, int N, RngStream& stream, GaussianLaw law) {
  require(N <= basis.n_max, ErrorKind::shape, "N exceeds the basis cutoff");
  return sample_field(basis.geometry, N, stream, law);
}

double inverse_power_sum(int N, const Geometry& g, double s) {
  require(N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  double acc = 0.0;
  // Smallest terms first.
  for (int n = N; n >= 0; --n) {
    const double lam2 = g.dim == 1 && !g.radial ? 1.0 + 2.0 * n : 4.0 * n + g.dim;
    acc += s == 1.0 ? 1.0 / lam2 : std::pow(lam2, -s);
  }
  return acc;
}

double sigma_integral(int N, const Geometry& g) { return inverse_power_sum(N, g, 1.0); }

double wick_mass(const FieldCoeffs& f) { return f.l2_squared() - sigma_integral(f.n_cut, f.geometry); }

double wick_second_moment_exact(int N, const Geometry& g, GaussianLaw law) {
  return chaos_constant(law) * inverse_power_sum(N, g, 2.0);
}

WickMassStats wick_mass_stats(int N, const Geometry& g, GaussianLaw law) {
  return {N, sigma_integral(N, g), wick_second_moment_exact(N, g, law)};
}

std::vector<std::complex<double>> synthesize(const FieldCoeffs& f, const EigenBasis& basis) {
  require(f.geometry == basis.geometry, ErrorKind::shape, "field and basis geometries differ");
  require(f.n_cut <= basis.n_max, ErrorKind::shape, "field truncation exceeds the basis cutoff");
  const auto G = static_cast<Eigen::Index>(basis.grid.size());
  Eigen::VectorXd re(f.n_cut + 1), im(f.n_cut + 1);
  for (int n = 0; n <= f.n_cut; ++n) {
    re[n] = f.coeffs[n].real();
    im[n] = f.coeffs[n].imag();
  }
  const auto H = basis.values.topRows(f.n_cut + 1);
  const Eigen::VectorXd ur = H.transpose() * re;
  const Eigen::VectorXd ui = H.transpose() * im;
  std::vector<std::complex<double>> u(G);
  for (Eigen::Index j = 0; j < G; ++j) u[j] = {ur[j], ui[j]};
  return u;
}

double lp_norm(const FieldCoeffs& f, double p, const EigenBasis& basis) {
  require(p >= 1.0, ErrorKind::invalid_argument, "p must be >= 1");
  const auto u = synthesize(f, basis);
  std::vector<double> mod(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) mod[j] = std::abs(u[j]);
  return std::pow(grid_lp_power(mod, basis.grid, p), 1.0 / p);
}

double sobolev_norm(const FieldCoeffs& f, double s) {
  double acc = 0.0;
  for (int n = 0; n <= f.n_cut; ++n) acc += std::pow(eigenvalue(n, f.geometry), 2.0 * s) * std::norm(f.coeffs[n]);
  return std::sqrt(acc);
}

std::vector<std::string> gns_violations(double p, const Geometry& g) {
  std::vector<std::string> v = g.violations();
  if (!(p > 2.0)) v.push_back("p must be > 2");
  if (auto lim = g.sobolev_limit(); lim && !(p < *lim))
    v.push_back("p must be < 2d/(d-2) = " + std::to_string(*lim) + " for d = " + std::to_string(g.dim));
  return v;
}

double gns_ratio(const FieldCoeffs& f, double p, const EigenBasis& basis) {
  const auto v = gns_violations(p, f.geometry);
  if (!v.empty()) fail(ErrorKind::invalid_argument, v.front());
  const double l2 = std::sqrt(f.l2_squared());
  require(l2 > 0.0, ErrorKind::undefined_ratio, "gns_ratio of the zero field");
  const double d = f.geometry.dim;
  const double lp = lp_norm(f, p, basis);
  const double h1 = sobolev_norm(f, 1.0);
  return std::pow(lp, p) / (std::pow(h1, (p - 2.0) * d / 2.0) * std::pow(l2, 2.0 + (p - 2.0) * (2.0 - d) / 2.0));
}

void fill_field_block(std::uint64_t seed, std::uint64_t first, Eigen::Index rows, int N, GaussianLaw law,
                      const double* lambdas, CoeffBlock& out) {
  out.re.resize(rows, N + 1);
  if (law == GaussianLaw::circular_complex)
    out.im.resize(rows, N + 1);
  else
    out.im.resize(0, 0);
  std::vector<std::complex<double>> g(N + 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    RngStream s = sample_stream(seed, StreamPurpose::field, first + static_cast<std::uint64_t>(r));
    draw_gaussians(s, law, N + 1, g.data());
    for (int n = 0; n <= N; ++n) {
      const double inv = lambdas ? 1.0 / lambdas[n] : 1.0;
      out.re(r, n) = g[n].real() * inv;
      if (out.complex()) out.im(r, n) = g[n].imag() * inv;
    }
  }
}

double row_mass(const CoeffBlock& b, Eigen::Index r) {
  double m = b.re.row(r).squaredNorm();
  if (b.complex()) m += b.im.row(r).squaredNorm();
  return m;
}

CoeffBlock gather_rows(const CoeffBlock& b, const std::vector<Eigen::Index>& rows) {
  CoeffBlock out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.re.resize(n, b.re.cols());
  if (b.complex()) out.im.resize(n, b.im.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.re.row(i) = b.re.row(rows[i]);
    if (b.complex()) out.im.row(i) = b.im.row(rows[i]);
  }
  return out;
}

namespace {

// Accumulates sum_j w_j q_j^{p/2} for q = |u|^2 with fast paths for even
// integer exponents.
void accumulate_powers(const Eigen::MatrixXd& q, const Eigen::VectorXd& w, const std::vector<double>& ps,
                       Eigen::Index row0, Eigen::MatrixXd& out) {
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double half = 0.5 * ps[k];
    const bool integral = half == std::floor(half) && half >= 1.0 && half <= 8.0;
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      double s = 0.0;
      if (integral) {
        const int m = static_cast<int>(half);
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
          const double b = q(r, j);
          double v = b;
          for (int t = 1; t < m; ++t) v *= b;
          s += w[j] * v;
        }
      } else {
        for (Eigen::Index j = 0; j < q.cols(); ++j) s += w[j] * std::pow(q(r, j), half);
      }
      out(row0 + r, static_cast<Eigen::Index>(k)) = s;
    }
  }
}

}  // namespace

Eigen::MatrixXd lp_powers_batch(const CoeffBlock& block, const EigenBasis& basis, const std::vector<double>& ps) {
  const Eigen::Index modes = block.re.cols();
  require(modes <= basis.n_max + 1, ErrorKind::shape, "coefficient block exceeds the basis cutoff");
  const Eigen::Index G = static_cast<Eigen::Index>(basis.grid.size());
  const Eigen::Map<const Eigen::VectorXd> w(basis.grid.weights.data(), G);
  const auto H = basis.values.topRows(modes);
  Eigen::MatrixXd out(block.rows(), static_cast<Eigen::Index>(ps.size()));
  constexpr Eigen::Index kRows = 128;
  Eigen::MatrixXd u, v;
  for (Eigen::Index r0 = 0; r0 < block.rows(); r0 += kRows) {
    const Eigen::Index nr = std::min(kRows, block.rows() - r0);
    u.noalias() = block.re.middleRows(r0, nr) * H;
    u = u.cwiseAbs2();
    if (block.complex()) {
      v.noalias() = block.im.middleRows(r0, nr) * H;
      u += v.cwiseAbs2();
    }
    accumulate_powers(u, w, ps, r0, out);
  }
  return out;
}

const char* to_string(FieldStatistic s) {
  switch (s) {
    case FieldStatistic::wick_mass: return "wick_mass";
    case FieldStatistic::wick_mass_squared: return "wick_mass_squared";
    case FieldStatistic::wick_increment_squared: return "wick_increment_squared";
    case FieldStatistic::negative_sobolev: return "negative_sobolev";
    case FieldStatistic::lp_power: return "lp_power";
  }
  return "unknown";
}

McEstimate field_moment(const FieldMomentRequest& req, const Geometry& g, const EigenBasis* basis,
                        const McOptions& opt) {
  g.validate();
  require(req.N >= 0, ErrorKind::invalid_argument, "N must be nonnegative");
  const bool incr = req.stat == FieldStatistic::wick_increment_squared;
  if (incr) require(req.N2 > req.N, ErrorKind::invalid_argument, "increment needs N2 > N");
  if (req.stat == FieldStatistic::lp_power) {
    require(basis != nullptr, ErrorKind::invalid_argument, "lp_power needs a basis");
    require(req.N <= basis->n_max, ErrorKind::shape, "N exceeds the basis cutoff");
    require(req.param >= 1.0, ErrorKind::invalid_argument, "p must be >= 1");
  }
  const int top = incr ? req.N2 : req.N;
  std::vector<double> lam(top + 1);
  std::vector<double> hsw(top + 1);
  for (int n = 0; n <= top; ++n) {
    lam[n] = eigenvalue(n, g);
    hsw[n] = std::pow(lam[n], -2.0 * req.param);
  }
  const double sig = sigma_integral(req.N, g);
  const double sig2 = incr ? sigma_integral(req.N2, g) : 0.0;
  const ChunkLayout layout = opt.layout();

  auto parts = run_chunks<Welford>(layout, opt.threads, [&](std::uint64_t c) {
    CoeffBlock blk;
    const auto rows = static_cast<Eigen::Index>(layout.chunk_size);
    fill_field_block(opt.seed, layout.first_sample(c), rows, top, opt.law, lam.data(), blk);
    Welford acc;
    if (req.stat == FieldStatistic::lp_power) {
      const Eigen::MatrixXd pw = lp_powers_batch(blk, *basis, {req.param});
      for (Eigen::Index r = 0; r < rows; ++r) acc.add(pw(r, 0));
      return acc;
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      double m = 0.0, mtop = 0.0, hs = 0.0;
      for (int n = 0; n <= top; ++n) {
        double a = blk.re(r, n) * blk.re(r, n);
        if (blk.complex()) a += blk.im(r, n) * blk.im(r, n);
        if (n <= req.N) {
          m += a;
          hs += hsw[n] * a;
        }
        mtop += a;
      }
      double x = 0.0;
      switch (req.stat) {
        case FieldStatistic::wick_mass: x = m - sig; break;
        case FieldStatistic::wick_mass_squared: x = (m - sig) * (m - sig); break;
        case FieldStatistic::wick_increment_squared: {
          const double d = (mtop - sig2) - (m - sig);
          x = d * d;
          break;
        }
        case FieldStatistic::negative_sobolev: x = hs; break;
        case FieldStatistic::lp_power: break;
      }
      acc.add(x);
    }
    return acc;
  });
  return make_estimate(to_string(req.stat), reduce_in_order(parts), opt.seed, layout);
}

std::optional<double> field_moment_exact(const FieldMomentRequest& req, const Geometry& g, GaussianLaw law) {
  const double kappa = chaos_constant(law);
  switch (req.stat) {
    case FieldStatistic::wick_mass: return 0.0;
    case FieldStatistic::wick_mass_squared: return kappa * inverse_power_sum(req.N, g, 2.0);
    case FieldStatistic::wick_increment_squared:
      return kappa * (inverse_power_sum(req.N2, g, 2.0) - inverse_power_sum(req.N, g, 2.0));
    case FieldStatistic::negative_sobolev: return inverse_power_sum(req.N, g, 1.0 + req.param);
    case FieldStatistic::lp_power: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace hgibbs
