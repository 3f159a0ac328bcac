#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"
#include "hgibbs/gaussian_field.hpp"

using namespace hgibbs;

namespace {
const Geometry kLine = Geometry::line();
const Geometry kDisk = Geometry::radial_space(2);
}  // namespace

TEST_SUITE("field") {
  TEST_CASE("sigma integral") {
    CHECK(sigma_integral(2, kLine) == doctest::Approx(1.0 + 1.0 / 3 + 1.0 / 5).epsilon(1e-15));
    CHECK(sigma_integral(0, kLine) == 1.0);
    CHECK(sigma_integral(0, kDisk) == 0.5);
  }

  TEST_CASE("wick mass closed forms") {
    CHECK(wick_mass(FieldCoeffs::zero(kLine, 4)) ==
          doctest::Approx(-(1 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7 + 1.0 / 9)).epsilon(1e-15));
    CHECK(wick_mass(FieldCoeffs::mode(kLine, 0, 0, std::sqrt(2.0))) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(wick_mass(FieldCoeffs::mode(kLine, 8, 3, 1.0 / std::sqrt(7.0))) ==
          doctest::Approx(1.0 / 7 - sigma_integral(8, kLine)).epsilon(1e-14));
    CHECK(wick_second_moment_exact(2, kLine) == doctest::Approx(2 * (1 + 1.0 / 9 + 1.0 / 25)).epsilon(1e-15));
    CHECK(wick_second_moment_exact(0, kLine) == 2.0);
    CHECK(wick_second_moment_exact(0, kLine, GaussianLaw::circular_complex) == 1.0);
  }

  TEST_CASE("norms of simple fields") {
    const EigenBasis b = build_basis(kLine, 8, 1e-10);
    const FieldCoeffs h0 = FieldCoeffs::mode(kLine, 8, 0);
    CHECK(lp_norm(h0, 4.0, b) == doctest::Approx(std::pow(2 * std::numbers::pi, -0.125)).epsilon(1e-9));
    CHECK(lp_norm(FieldCoeffs::zero(kLine, 8), 4.0, b) == 0.0);
    const FieldCoeffs two = FieldCoeffs::mode(kLine, 8, 0, 2.0);
    for (double p : {3.0, 4.0, 6.0}) CHECK(lp_norm(two, p, b) == doctest::Approx(2 * lp_norm(h0, p, b)).epsilon(1e-12));
    CHECK(sobolev_norm(FieldCoeffs::mode(kLine, 8, 2), 1.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(sobolev_norm(h0, 3.7) == doctest::Approx(1.0).epsilon(1e-15));
    FieldCoeffs mixed = FieldCoeffs::deterministic(kLine, {0.3, {0.1, -0.2}, 0.0, 0.4});
    CHECK(sobolev_norm(mixed, 0.0) == doctest::Approx(std::sqrt(mixed.l2_squared())).epsilon(1e-15));
  }

  TEST_CASE("gns ratio") {
    const EigenBasis b = build_basis(kLine, 32, 1e-10);
    CHECK(gns_ratio(FieldCoeffs::mode(kLine, 32, 0), 4.0, b) ==
          doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-9));
    try {
      gns_ratio(FieldCoeffs::zero(kLine, 32), 4.0, b);
      FAIL("expected undefined-ratio error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::undefined_ratio);
    }
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
      RngStream s = sample_stream(8, StreamPurpose::field, i);
      worst = std::max(worst, gns_ratio(sample_field(b, 32, s), 4.0, b));
    }
    CHECK(std::isfinite(worst));
    CHECK(worst <= 10.0);
  }

  TEST_CASE("gns ratio of the profiles is bounded in M") {
    double lo = INFINITY, hi = 0;
    for (int M : {8, 16, 32, 64}) {
      const int N = default_mode_cutoff(M, kLine);
      const EigenBasis b = build_basis(kLine, N, default_accuracy(kLine, N));
      const ProfileFM prof = build_profile(M, b);
      std::vector<std::complex<double>> c(prof.spectral.begin(), prof.spectral.end());
      const double r = gns_ratio(FieldCoeffs::deterministic(kLine, c), 4.0, b);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 3.0);
  }

  TEST_CASE("sampled coefficients have the right covariance") {
    const int n = 100000, N = 8;
    std::vector<Welford> diag(N + 1), off(N);
    for (int i = 0; i < n; ++i) {
      RngStream s = sample_stream(17, StreamPurpose::field, i);
      const FieldCoeffs f = sample_field(kLine, N, s);
      for (int k = 0; k <= N; ++k) diag[k].add(std::norm(f.coeffs[k]) * std::pow(eigenvalue(k, kLine), 2));
      for (int k = 0; k < N; ++k) off[k].add(std::real(f.coeffs[k] * std::conj(f.coeffs[k + 1])));
    }
    for (int k = 0; k <= N; ++k) CHECK(std::abs(diag[k].mean - 1.0) <= 3.0 * std::sqrt(diag[k].variance() / n));
    for (int k = 0; k < N; ++k) CHECK(std::abs(off[k].mean) <= 3.0 * std::sqrt(off[k].variance() / n));
  }

  TEST_CASE("complex law has unit total variance") {
    const int n = 50000;
    Welford w;
    for (int i = 0; i < n; ++i) {
      RngStream s = sample_stream(3, StreamPurpose::field, i);
      w.add(std::norm(sample_field(kLine, 0, s, GaussianLaw::circular_complex).coeffs[0]));
    }
    CHECK(std::abs(w.mean - 1.0) <= 4.0 * std::sqrt(w.variance() / n));
  }

  TEST_CASE("truncations are prefixes of each other") {
    CoeffBlock a, b;
    fill_field_block(5, 100, 16, 8, GaussianLaw::real, nullptr, a);
    fill_field_block(5, 100, 16, 64, GaussianLaw::real, nullptr, b);
    CHECK(a.re == b.re.leftCols(9));
    fill_field_block(5, 100, 16, 8, GaussianLaw::circular_complex, nullptr, a);
    fill_field_block(5, 100, 16, 64, GaussianLaw::circular_complex, nullptr, b);
    CHECK(a.re == b.re.leftCols(9));
    CHECK(a.im == b.im.leftCols(9));
  }

  TEST_CASE("block rows match single-field draws") {
    CoeffBlock blk;
    fill_field_block(21, 40, 4, 12, GaussianLaw::real, nullptr, blk);
    for (int r = 0; r < 4; ++r) {
      RngStream s = sample_stream(21, StreamPurpose::field, 40 + r);
      const FieldCoeffs f = sample_field(kLine, 12, s);
      for (int n = 0; n <= 12; ++n) CHECK(blk.re(r, n) == doctest::Approx(f.coeffs[n].real() * eigenvalue(n, kLine)));
    }
  }

  TEST_CASE("field moments against closed forms") {
    McOptions opt;
    opt.seed = 2024;
    opt.samples = 100000;
    for (auto [stat, N, N2, param] : {std::tuple{FieldStatistic::wick_mass_squared, 32, 0, 0.0},
                                      std::tuple{FieldStatistic::negative_sobolev, 64, 0, 0.5},
                                      std::tuple{FieldStatistic::wick_mass, 64, 0, 0.0},
                                      std::tuple{FieldStatistic::wick_increment_squared, 16, 128, 0.0}}) {
      const FieldMomentRequest req{stat, N, N2, param};
      const McEstimate e = field_moment(req, kLine, nullptr, opt);
      const double exact = field_moment_exact(req, kLine, opt.law).value();
      CAPTURE(to_string(stat));
      CHECK(std::abs(e.mean() - exact) <= 4.0 * e.stderr_());
    }
    CHECK(field_moment_exact({FieldStatistic::negative_sobolev, 64, 0, 0.5}, kLine, GaussianLaw::real).value() ==
          doctest::Approx(inverse_power_sum(64, kLine, 1.5)).epsilon(1e-14));
  }

  TEST_CASE("batched L^p powers agree with synthesis") {
    const EigenBasis b = build_basis(kLine, 24, 1e-10);
    CoeffBlock blk;
    fill_field_block(9, 0, 5, 24, GaussianLaw::real, b.lambdas.data(), blk);
    const Eigen::MatrixXd lp = lp_powers_batch(blk, b, {3.0, 4.0, 8.0});
    for (int r = 0; r < 5; ++r) {
      std::vector<std::complex<double>> c(25);
      for (int n = 0; n <= 24; ++n) c[n] = blk.re(r, n);
      const FieldCoeffs f = FieldCoeffs::deterministic(kLine, c);
      CHECK(lp(r, 0) == doctest::Approx(std::pow(lp_norm(f, 3.0, b), 3.0)).epsilon(1e-10));
      CHECK(lp(r, 1) == doctest::Approx(std::pow(lp_norm(f, 4.0, b), 4.0)).epsilon(1e-10));
      CHECK(lp(r, 2) == doctest::Approx(std::pow(lp_norm(f, 8.0, b), 8.0)).epsilon(1e-10));
    }
  }

  TEST_CASE("law parsing") {
    CHECK(parse_law("real") == GaussianLaw::real);
    CHECK(parse_law("circular_complex") == GaussianLaw::circular_complex);
    CHECK_THROWS_AS(parse_law("cauchy"), Error);
  }
}
