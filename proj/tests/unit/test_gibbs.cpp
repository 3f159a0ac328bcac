#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgibbs/errors.hpp"
#include "hgibbs/gibbs_measure.hpp"

using namespace hgibbs;

namespace {
const Geometry kLine = Geometry::line();

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

GibbsSpec spec(double p, double K, int N, double r = 1.0) {
  GibbsSpec s;
  s.geometry = kLine;
  s.p = p;
  s.K = K;
  s.N = N;
  s.r = r;
  return s;
}
}  // namespace

TEST_SUITE("gibbs") {
  TEST_CASE("spec validation") {
    CHECK(spec(4, 1, 16).violations().empty());
    GibbsSpec bad = spec(7, 1, 16);
    bad.geometry = Geometry::radial_space(3);
    CHECK_FALSE(bad.violations().empty());
    try {
      bad.validate();
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
    CHECK_FALSE(spec(1.5, 1, 16).violations().empty());
    CHECK_FALSE(spec(4, -1, 16).violations().empty());
    CHECK(spec(8, 1, 64).non_normalizable());
    CHECK_FALSE(spec(4, 1, 64).non_normalizable());
  }

  TEST_CASE("h0 L^p power") {
    CHECK(h0_lp_power(4, kLine) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(h0_lp_power(2, kLine) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("one-mode partition closed forms") {
    CHECK(exact_partition_n0(spec(4, 1, 0, 0), GaussianLaw::circular_complex) ==
          doctest::Approx(1 - std::exp(-2.0)).epsilon(1e-10));
    CHECK(exact_partition_n0(spec(4, 1, 0, 0)) == doctest::Approx(std::erf(1.0)).epsilon(1e-10));
    CHECK(exact_partition_n0(spec(4, 1e6, 0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("one-mode partition against Simpson") {
    const double c = 1.0 / std::sqrt(2 * std::numbers::pi);
    const double cplx = simpson([&](double t) { return std::exp(t * t * c / 4) * std::exp(-t); }, 0.0, 2.0);
    CHECK(exact_partition_n0(spec(4, 1, 0), GaussianLaw::circular_complex) == doctest::Approx(cplx).epsilon(1e-8));
    // real law: g in [-sqrt 2, sqrt 2]
    const double s2 = std::sqrt(2.0);
    const double real = simpson(
        [&](double g) { return std::exp(std::pow(g, 4) * c / 4) * std::exp(-g * g / 2) / std::sqrt(2 * std::numbers::pi); },
        -s2, s2);
    CHECK(exact_partition_n0(spec(4, 1, 0)) == doctest::Approx(real).epsilon(1e-8));
    // regression value of the complex-law case
    CHECK(exact_partition_n0(spec(4, 1, 0), GaussianLaw::circular_complex) == doctest::Approx(0.93602527667).epsilon(1e-9));
  }

  TEST_CASE("monte carlo agrees with the one-mode oracle") {
    const EigenBasis b = build_basis(kLine, 0, 1e-10);
    McOptions opt;
    opt.seed = 5;
    opt.samples = 100000;
    for (auto law : {GaussianLaw::real, GaussianLaw::circular_complex}) {
      opt.law = law;
      const McEstimate e = estimate_partition(spec(4, 1, 0), b, opt);
      CHECK(std::abs(e.mean() - exact_partition_n0(spec(4, 1, 0), law)) <= 3.0 * e.stderr_());
    }
  }

  TEST_CASE("indicator only") {
    const EigenBasis b = build_basis(kLine, 16, 1e-10);
    McOptions opt;
    opt.samples = 20000;
    const McEstimate small = estimate_partition(spec(4, 0.5, 16, 0), b, opt);
    const McEstimate big = estimate_partition(spec(4, 1e3, 16, 0), b, opt);
    CHECK(small.mean() > 0.0);
    CHECK(small.mean() < 1.0);
    CHECK(big.mean() == 1.0);
  }

  TEST_CASE("density moment and potential expectation") {
    const EigenBasis b = build_basis(kLine, 16, 1e-10);
    McOptions opt;
    opt.samples = 20000;
    const McEstimate z = estimate_partition(spec(4, 1, 16), b, opt);
    const McEstimate z1 = density_moment(spec(4, 1, 16, 7.0), b, 1.0, opt);
    CHECK(z.mean() == z1.mean());
    const McEstimate z2 = density_moment(spec(4, 1, 16), b, 2.0, opt);
    CHECK(z2.mean() >= z.mean() * z.mean() - 3 * z2.stderr_());
    const McEstimate pot = potential_expectation(spec(4, 1, 16), b, opt);
    CHECK(pot.mean() > 0.0);
    // e^R >= 1 + R on the event
    const McEstimate mass = estimate_partition(spec(4, 1, 16, 0), b, opt);
    CHECK(z.mean() >= mass.mean() + pot.mean() - 3 * z.stderr_());
  }

  TEST_CASE("inside placement dominates its indicator") {
    const EigenBasis b = build_basis(kLine, 16, 1e-10);
    McOptions opt;
    opt.samples = 20000;
    GibbsSpec in = spec(4, 1, 16);
    in.placement = IndicatorPlacement::inside;
    const McEstimate zi = estimate_partition(in, b, opt);
    const McEstimate zo = estimate_partition(spec(4, 1, 16), b, opt);
    CHECK(zi.mean() >= zo.mean());
  }

  TEST_CASE("boundary ratio") {
    McOptions opt;
    opt.samples = 100000;
    for (double K : {0.5, 1.0, 2.0}) {
      const BoundaryRatio r = boundary_ratio(32, K, 0.05, 0.1, kLine, opt);
      CHECK(r.expected == 0.5);
      CHECK(std::abs(r.ratio - 0.5) <= 4.0 * r.ratio_stderr);
      CHECK(r.narrow.mean() <= r.wide.mean());
    }
  }

  TEST_CASE("tail set") {
    const EigenBasis b = build_basis(kLine, 512, default_accuracy(kLine, 512));
    McOptions opt;
    opt.samples = 5000;
    const McEstimate e = tail_set_probability(64, 1.0, 4.0, 512, b, opt);
    CHECK(e.mean() >= 0.5);
    CHECK(tail_neglected_variance(512, kLine) > 0.0);
    CHECK(default_tail_cut(64) == 512);
  }

  TEST_CASE("thread count does not change estimates") {
    const EigenBasis b = build_basis(kLine, 32, 1e-10);
    McOptions a;
    a.samples = 8000;
    a.chunk_size = 500;
    a.threads = 1;
    McOptions c = a;
    c.threads = 3;
    const McEstimate x = estimate_partition(spec(4, 1, 32), b, a);
    const McEstimate y = estimate_partition(spec(4, 1, 32), b, c);
    CHECK(x.mean() == y.mean());
    CHECK(x.acc.m2 == y.acc.m2);
    CHECK(x.running_max() == y.running_max());
  }
}
