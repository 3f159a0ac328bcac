#include <cmath>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"

namespace hgibbs {

OUCoupling ou_coupling(int M, int N, const Geometry& g) {
  g.validate();
  require(M >= 1 && M <= N, ErrorKind::invalid_argument, "need 1 <= M <= N");
  OUCoupling c;
  c.geometry = g;
  c.M = M;
  c.N = N;
  c.lambdas.resize(N + 1);
  for (int n = 0; n <= N; ++n) c.lambdas[n] = eigenvalue(n, g);
  const double sm = std::sqrt(static_cast<double>(M));
  c.modes.resize(M + 1);
  for (int n = 0; n <= M; ++n) {
    OUMode& m = c.modes[n];
    const double lam = c.lambdas[n];
    m.lambda = lam;
    m.a = sm / lam;
    const double e2 = -std::expm1(-2.0 * m.a);  // 1 - e^{-2a}
    const double e1 = -std::expm1(-m.a);        // 1 - e^{-a}
    m.var_x = e2 / (2.0 * m.a) / (lam * lam);
    m.cov_bx = e1 / m.a / lam;
    m.z_second = 1.0 / (lam * lam) - 2.0 * m.cov_bx / lam + m.var_x;
    m.int_var_x = (1.0 - e2 / (2.0 * m.a)) / (2.0 * m.a) / (lam * lam);
  }
  return c;
}

void fill_joint_block(const OUCoupling& c, std::uint64_t seed, std::uint64_t first, Eigen::Index rows,
                      GaussianLaw law, CoeffBlock& y, CoeffBlock& x) {
  const int N = c.N;
  fill_field_block(seed, first, rows, N, law, nullptr, y);  // raw g_n = B_n(1)
  x.re.resize(rows, N + 1);
  if (law == GaussianLaw::circular_complex)
    x.im.resize(rows, N + 1);
  else
    x.im.resize(0, 0);
  const int Mc = c.coupled_modes();
  std::vector<double> slope(Mc), resid(Mc);
  for (int n = 0; n < Mc; ++n) {
    slope[n] = c.modes[n].cov_bx;
    resid[n] = std::sqrt(std::max(0.0, c.modes[n].var_x - slope[n] * slope[n]));
  }
  std::vector<std::complex<double>> xi(Mc);
  for (Eigen::Index r = 0; r < rows; ++r) {
    RngStream s = sample_stream(seed, StreamPurpose::innovation, first + static_cast<std::uint64_t>(r));
    draw_gaussians(s, law, Mc, xi.data());
    for (int n = 0; n <= N; ++n) {
      const double inv = 1.0 / c.lambdas[n];
      if (n < Mc) {
        x.re(r, n) = slope[n] * y.re(r, n) + resid[n] * xi[n].real();
        if (x.complex()) x.im(r, n) = slope[n] * y.im(r, n) + resid[n] * xi[n].imag();
      } else {
        x.re(r, n) = y.re(r, n) * inv;
        if (x.complex()) x.im(r, n) = y.im(r, n) * inv;
      }
      y.re(r, n) *= inv;
      if (y.complex()) y.im(r, n) *= inv;
    }
  }
}

std::pair<FieldCoeffs, FieldCoeffs> sample_joint_endpoint(const OUCoupling& c, std::uint64_t seed,
                                                          std::uint64_t sample, GaussianLaw law) {
  CoeffBlock y, x;
  fill_joint_block(c, seed, sample, 1, law, y, x);
  std::vector<std::complex<double>> yc(c.N + 1), zc(c.N + 1);
  for (int n = 0; n <= c.N; ++n) {
    const std::complex<double> yv(y.re(0, n), y.complex() ? y.im(0, n) : 0.0);
    const std::complex<double> xv(x.re(0, n), x.complex() ? x.im(0, n) : 0.0);
    yc[n] = yv;
    zc[n] = yv - xv;
  }
  FieldCoeffs Y = FieldCoeffs::deterministic(c.geometry, std::move(yc));
  FieldCoeffs Z = FieldCoeffs::deterministic(c.geometry, std::move(zc));
  Y.provenance = {true, seed, static_cast<std::uint64_t>(StreamPurpose::field), sample, law};
  Z.provenance = {true, seed, static_cast<std::uint64_t>(StreamPurpose::innovation), sample, law};
  return {std::move(Y), std::move(Z)};
}

double alpha_numerator(const OUCoupling& c) {
  double s = 0.0;
  for (const auto& m : c.modes) s += 1.0 / (m.lambda * m.lambda) - m.var_x;
  return s;
}

namespace {

double mass(const std::vector<double>& fhat, int N) {
  double s = 0.0;
  for (int n = 0; n <= N && n < static_cast<int>(fhat.size()); ++n) s += fhat[n] * fhat[n];
  return s;
}

}  // namespace

double alpha(const OUCoupling& c, const std::vector<double>& fhat) {
  require(static_cast<int>(fhat.size()) > c.N, ErrorKind::shape, "profile projections shorter than N + 1");
  const double m = mass(fhat, c.N);
  require(m >= 0.5, ErrorKind::resolution,
          "||P_N f_M||^2 = " + std::to_string(m) + " < 0.5: N too small for M = " + std::to_string(c.M));
  return alpha_numerator(c) / m;
}

double drift_cost(const OUCoupling& c, const std::vector<double>& fhat, double alpha_val) {
  double z = 0.0;
  for (const auto& m : c.modes) z += m.int_var_x;
  z *= c.M;
  double f = 0.0;
  for (int n = 0; n <= c.N; ++n) f += c.lambdas[n] * c.lambdas[n] * fhat[n] * fhat[n];
  return z + alpha_val * f;
}

std::pair<double, double> pairing_variance(const OUCoupling& c, const std::vector<double>& fhat) {
  require(static_cast<int>(fhat.size()) > c.N, ErrorKind::shape, "profile projections shorter than N + 1");
  double y = 0.0, z = 0.0;
  for (int n = 0; n <= c.N; ++n) y += fhat[n] * fhat[n] / (c.lambdas[n] * c.lambdas[n]);
  for (int n = 0; n < c.coupled_modes(); ++n) z += c.modes[n].z_second * fhat[n] * fhat[n];
  return {y, z};
}

LemmaValues lemma_values(const OUCoupling& c, const std::vector<double>& fhat, GaussianLaw law) {
  LemmaValues v;
  v.M = c.M;
  v.N = c.N;
  const double kappa = chaos_constant(law);
  const double pair_c = law == GaussianLaw::real ? 1.0 : 0.5;
  double tail4 = 0.0, low4 = 0.0, cross = 0.0;
  for (const auto& m : c.modes) {
    v.nrz0 += m.z_second;
    v.nrz6 += m.int_var_x;
    low4 += m.var_x * m.var_x;
  }
  v.nrz6 *= c.M;
  v.nrz1 = alpha_numerator(c);
  for (int n = c.coupled_modes(); n <= c.N; ++n) tail4 += std::pow(c.lambdas[n], -4.0);
  v.nrz3 = kappa * (tail4 + low4);
  std::tie(v.nrz5_y, v.nrz5_z) = pairing_variance(c, fhat);
  v.projected_mass = mass(fhat, c.N);
  for (int n = 0; n <= c.N; ++n) v.profile_h1 += c.lambdas[n] * c.lambdas[n] * fhat[n] * fhat[n];
  v.alpha = alpha(c, fhat);
  v.cost = drift_cost(c, fhat, v.alpha);
  double zh1 = 0.0;
  for (const auto& m : c.modes) zh1 += m.lambda * m.lambda * m.z_second;
  v.theta_h1 = zh1 + v.alpha * v.profile_h1;
  for (int n = 0; n <= c.N; ++n) {
    const double var = n < c.coupled_modes() ? c.modes[n].var_x : 1.0 / (c.lambdas[n] * c.lambdas[n]);
    cross += var * fhat[n] * fhat[n];
  }
  v.key_second_moment = v.nrz3 + 4.0 * v.alpha * pair_c * cross;
  return v;
}

std::array<double, 6> lemma_ratios(const LemmaValues& v) {
  const double M = v.M;
  const double lm = std::log(M);
  return {v.nrz0 / lm, v.nrz1 / lm, v.nrz3 * M / lm, (v.nrz5_y + v.nrz5_z) * std::pow(M, 1.5), v.nrz6 / M,
          v.cost / (M * M * lm)};
}

}  // namespace hgibbs
