#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"
#include "hgibbs/gibbs_measure.hpp"

using namespace hgibbs;

namespace {
const Geometry kLine = Geometry::line();

template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}
}  // namespace

TEST_SUITE("profile") {
  TEST_CASE("bump support") {
    CHECK(annular_bump(0.5) == 0.0);
    CHECK(annular_bump(1.0) == 0.0);
    CHECK(annular_bump(0.2) == 0.0);
    CHECK(annular_bump(0.75) == doctest::Approx(std::exp(-1.0)));
    CHECK(annular_bump(0.6) > 0.0);
  }

  TEST_CASE("unit profile value at the origin") {
    const BumpProfile f = BumpProfile::make(kLine);
    // f(0) = (2 pi)^{-1/2} int fhat over both half lines
    const double v = 2.0 * f.amplitude * simpson(annular_bump, 0.5, 1.0) / std::sqrt(2 * std::numbers::pi);
    CHECK(f.value(0.0) == doctest::Approx(v).epsilon(1e-8));
    const double l2 = 2.0 * simpson([&](double r) { return std::pow(f.fourier(r), 2); }, 0.5, 1.0);
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("profile norms and projections") {
    const EigenBasis b = build_basis(kLine, 512, default_accuracy(kLine, 512));
    const ProfileFM pf = build_profile(8.0, b);
    CHECK(std::abs(pf.l2_norm - 1.0) <= 1e-6);
    CHECK(std::abs(pf.projected_mass() - 1.0) <= 1e-3);
    const auto grid_side = project(pf.grid_values, b);
    for (int n = 0; n <= 128; ++n) CHECK(std::abs(grid_side[n] - pf.spectral[n]) <= 1e-8);
    const auto direct = profile_projections(8.0, kLine, 64);
    for (int n = 0; n <= 64; ++n) CHECK(std::abs(direct[n] - pf.spectral[n]) <= 1e-10);
    // odd modes vanish for an even profile
    CHECK(std::abs(pf.spectral[3]) <= 1e-14);
  }

  TEST_CASE("profile on its own grid") {
    for (int M : {16, 64}) {
      const ProfileFM pf = build_profile(M, profile_grid(M, kLine, default_mode_cutoff(M, kLine)), -1);
      CHECK(std::abs(pf.l2_norm - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("mode cutoff") {
    for (int M : {4, 16, 64}) {
      const int N = default_mode_cutoff(M, kLine);
      CHECK(eigenvalue(N, kLine) >= M);
      CHECK(eigenvalue(N - 1, kLine) < M);
      CHECK(default_mode_cutoff(M, kLine, 2.0) >= 2 * N);
    }
  }
}

TEST_SUITE("coupling") {
  TEST_CASE("mode formulas against direct integration") {
    const OUCoupling c = ou_coupling(16, 128, kLine);
    for (int n : {0, 3, 16}) {
      const OUMode& m = c.modes[n];
      const double lam = eigenvalue(n, kLine), a = 4.0 / lam;
      auto var = [&](double s) { return (1 - std::exp(-2 * a * s)) / (2 * a) / (lam * lam); };
      CHECK(m.var_x == doctest::Approx(var(1.0)).epsilon(1e-12));
      // E[B(1) X(1)] = int_0^1 e^{-a(1-s)} / lambda ds
      CHECK(m.cov_bx == doctest::Approx(simpson([&](double s) { return std::exp(-a * (1 - s)) / lam; }, 0, 1)).epsilon(1e-10));
      CHECK(m.int_var_x == doctest::Approx(simpson(var, 0, 1)).epsilon(1e-10));
      CHECK(m.z_second == doctest::Approx(1 / (lam * lam) - 2 * m.cov_bx / lam + m.var_x).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ou_coupling(20, 10, kLine), Error);
  }

  TEST_CASE("alpha numerator is positive") {
    for (int M : {16, 32, 64, 128, 256}) {
      const OUCoupling c = ou_coupling(M, default_mode_cutoff(M, kLine), kLine);
      CHECK(alpha_numerator(c) > 0.0);
    }
  }

  struct JointMoments {
    Welford z2, num, wick, py, pz;
  };

  JointMoments joint_moments(const OUCoupling& c, const std::vector<double>& fhat, int n) {
    JointMoments m;
    CoeffBlock y, x;
    const int N = c.N, Mc = c.coupled_modes();
    double ex = 0;
    for (int k = 0; k <= N; ++k) ex += k < Mc ? c.modes[k].var_x : 1.0 / (c.lambdas[k] * c.lambdas[k]);
    for (int first = 0; first < n; first += 1000) {
      fill_joint_block(c, 31, first, 1000, GaussianLaw::real, y, x);
      for (int r = 0; r < 1000; ++r) {
        double zz = 0, yz = 0, xx = 0, fy = 0, fz = 0;
        for (int k = 0; k <= N; ++k) {
          const double z = y.re(r, k) - x.re(r, k);
          zz += z * z;
          yz += y.re(r, k) * z;
          xx += x.re(r, k) * x.re(r, k);
          fy += y.re(r, k) * fhat[k];
          fz += z * fhat[k];
        }
        m.z2.add(zz);
        m.num.add(2 * yz - zz);
        m.wick.add((xx - ex) * (xx - ex));
        m.py.add(fy * fy);
        m.pz.add(fz * fz);
      }
    }
    return m;
  }

  double se(const Welford& w) { return std::sqrt(w.variance() / w.count); }

  TEST_CASE("joint endpoint moments at M = 64, N = 512") {
    const OUCoupling c = ou_coupling(64, 512, kLine);
    const JointMoments m = joint_moments(c, std::vector<double>(513, 0.0), 100000);
    double nrz0 = 0;
    for (const auto& mode : c.modes) nrz0 += mode.z_second;
    CHECK(std::abs(m.z2.mean - nrz0) <= 4 * se(m.z2));
    CHECK(std::abs(m.num.mean - alpha_numerator(c)) <= 4 * se(m.num));
  }

  TEST_CASE("numerator and pairings at M = 32, N = 256") {
    const OUCoupling c = ou_coupling(32, 256, kLine);
    const auto fhat = profile_projections(32, kLine, 256);
    const JointMoments m = joint_moments(c, fhat, 100000);
    const auto [vy, vz] = pairing_variance(c, fhat);
    CHECK(std::abs(m.num.mean - alpha_numerator(c)) <= 4 * se(m.num));
    CHECK(std::abs(m.py.mean - vy) <= 4 * se(m.py));
    CHECK(std::abs(m.pz.mean - vz) <= 4 * se(m.pz) + 1e-15);
  }

  TEST_CASE("lemma values against joint draws at M = 16") {
    const int N = default_mode_cutoff(16, kLine);
    const OUCoupling c = ou_coupling(16, N, kLine);
    const auto fhat = profile_projections(16, kLine, N);
    const LemmaValues v = lemma_values(c, fhat);
    const JointMoments m = joint_moments(c, fhat, 100000);
    CHECK(std::abs(m.z2.mean - v.nrz0) <= 4 * se(m.z2));
    CHECK(std::abs(m.num.mean - v.nrz1) <= 4 * se(m.num));
    CHECK(std::abs(m.wick.mean - v.nrz3) <= 4 * se(m.wick));
    CHECK(std::abs(m.py.mean - v.nrz5_y) <= 4 * se(m.py));
    CHECK(std::abs(m.pz.mean - v.nrz5_z) <= 4 * se(m.pz) + 1e-15);
  }

  TEST_CASE("endpoint sample agrees with block row") {
    const OUCoupling c = ou_coupling(8, 40, kLine);
    const auto [Y, Z] = sample_joint_endpoint(c, 4, 12);
    CoeffBlock y, x;
    fill_joint_block(c, 4, 12, 1, GaussianLaw::real, y, x);
    for (int k = 0; k <= 40; ++k) {
      CHECK(Y.coeffs[k].real() == y.re(0, k));
      CHECK(Z.coeffs[k].real() == doctest::Approx(y.re(0, k) - x.re(0, k)));
    }
    for (int k = 9; k <= 40; ++k) CHECK(Z.coeffs[k] == 0.0);
  }

  TEST_CASE("lemma ratios stay in their intervals") {
    for (int M : {16, 32, 64, 128, 256}) {
      const int N = default_mode_cutoff(M, kLine);
      const OUCoupling c = ou_coupling(M, N, kLine);
      const LemmaValues v = lemma_values(c, profile_projections(M, kLine, N));
      const auto r = lemma_ratios(v);
      for (int i = 0; i < 6; ++i) {
        CAPTURE(kLemmaRatioBounds[i].name);
        CAPTURE(M);
        CHECK(r[i] >= kLemmaRatioBounds[i].lo);
        CHECK(r[i] <= kLemmaRatioBounds[i].hi);
      }
      CHECK(v.theta_h1 <= v.cost);
    }
  }
}

TEST_SUITE("drift") {
  TEST_CASE("plan basics") {
    const DriftPlan p = make_plan(16, default_mode_cutoff(16, kLine), 1.0, kLine);
    CHECK(p.alpha > 0.0);
    CHECK(p.expected_cost > 0.0);
    CHECK(p.projection_gap >= 0.0);
    CHECK(p.projection_gap < 1e-3);
    const DriftPlan z = null_plan(32, 1.0, kLine);
    CHECK(z.null_drift);
    CHECK(z.expected_cost == 0.0);
  }

  TEST_CASE("key probability grows with K and matches the second moment") {
    const int N = default_mode_cutoff(16, kLine);
    McOptions opt;
    opt.samples = 20000;
    const KeyResult a = key_probability(make_plan(16, N, 0.5, kLine), opt);
    const KeyResult b = key_probability(make_plan(16, N, 1.0, kLine), opt);
    CHECK(a.probability.mean() <= b.probability.mean());
    CHECK(std::abs(b.q_second.mean() - b.q_second_exact) <= 4 * b.q_second.stderr_());
  }

  TEST_CASE("null drift objective matches the Gibbs potential") {
    const int N = 32;
    const EigenBasis b = build_basis(kLine, N, 1e-10);
    McOptions opt;
    opt.samples = 20000;
    const auto obj = variational_objective({4.0}, null_plan(N, 1.0, kLine), b, opt);
    GibbsSpec s;
    s.p = 4.0;
    s.K = 1.0;
    s.N = N;
    const McEstimate pot = potential_expectation(s, b, opt);
    CHECK(obj[0].objective.mean() <= 0.0);
    CHECK(std::abs(-obj[0].objective.mean() - pot.mean()) <= 3 * std::hypot(obj[0].objective.stderr_(), pot.stderr_()));
  }

  TEST_CASE("objective decomposition") {
    const int M = 16, N = default_mode_cutoff(M, kLine);
    const EigenBasis b = build_basis(kLine, N, default_accuracy(kLine, N));
    McOptions opt;
    opt.samples = 4000;
    const auto res = variational_objective({4.0, 8.0}, make_plan(M, N, 1.0, kLine), b, opt);
    REQUIRE(res.size() == 2);
    for (const auto& r : res) CHECK(r.objective.mean() == doctest::Approx(r.cost - r.gain.mean()).epsilon(1e-12));
    CHECK(res[1].gain.mean() > res[0].gain.mean());
    CHECK(res[0].indicator.mean() == res[1].indicator.mean());
  }

  TEST_CASE("objective exponent admissibility") {
    CHECK(objective_violations(4.0, kLine).empty());
    CHECK_FALSE(objective_violations(2.0, kLine).empty());
    CHECK_FALSE(objective_violations(7.0, Geometry::radial_space(3)).empty());
  }
}
