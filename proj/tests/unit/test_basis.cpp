#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgibbs/errors.hpp"
#include "hgibbs/geometry.hpp"
#include "hgibbs/spectral_basis.hpp"

using namespace hgibbs;

namespace {
const Geometry kLine = Geometry::line();
const Geometry kDisk = Geometry::radial_space(2);

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::config;
}
}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("eigenvalues") {
    CHECK(eigenvalue(0, kLine) == 1.0);
    CHECK(eigenvalue(12, kLine) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(eigenvalue(2, kDisk) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
  }

  TEST_CASE("validation") {
    CHECK(kLine.violations().empty());
    CHECK(kDisk.violations().empty());
    CHECK_FALSE(Geometry{2, false}.violations().empty());
    CHECK_FALSE(Geometry{0, false}.violations().empty());
    CHECK(kind_of([] { Geometry{3, false}.validate(); }) == ErrorKind::config);
    CHECK(Geometry::radial_space(3).sobolev_limit().value() == doctest::Approx(6.0));
    CHECK_FALSE(kLine.sobolev_limit().has_value());
    CHECK(kLine.critical_exponent() == 6.0);
    CHECK(kDisk.critical_exponent() == 4.0);
  }
}

TEST_SUITE("basis") {
  TEST_CASE("pointwise values") {
    CHECK(eval_eigenfunction(0, 0.0, kLine) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-14));
    CHECK(std::abs(eval_eigenfunction(1, 0.0, kLine)) < 1e-300);
    // h_1 = sqrt(2) pi^{-1/4} x e^{-x^2/2}
    const double x = 0.7;
    CHECK(eval_eigenfunction(1, x, kLine) ==
          doctest::Approx(std::sqrt(2.0) * std::pow(std::numbers::pi, -0.25) * x * std::exp(-x * x / 2)).epsilon(1e-13));
    // radial d=2, n=0: h_0 = pi^{-1/2} e^{-r^2/2}
    CHECK(eval_eigenfunction(0, 0.5, kDisk) ==
          doctest::Approx(std::exp(-0.125) / std::sqrt(std::numbers::pi)).epsilon(1e-13));
  }

  TEST_CASE("sturm property: h_5 has five sign changes") {
    int changes = 0;
    double prev = eval_eigenfunction(5, -6.0, kLine);
    for (int i = 1; i <= 12000; ++i) {
      const double v = eval_eigenfunction(5, -6.0 + i * 1e-3, kLine);
      if (v * prev < 0) ++changes;
      if (v != 0.0) prev = v;
    }
    CHECK(changes == 5);
  }

  TEST_CASE("batch evaluation matches single evaluation") {
    std::vector<double> out(41);
    for (double x : {0.0, 0.3, 2.5, 7.0}) {
      eval_eigenfunctions(40, x, kLine, out.data());
      for (int n = 0; n <= 40; ++n) CHECK(out[n] == doctest::Approx(eval_eigenfunction(n, x, kLine)).epsilon(1e-12));
    }
  }

  TEST_CASE("high modes stay finite far out") {
    const double v = eval_eigenfunction(20000, 250.0, kLine);
    CHECK(std::isfinite(v));
    CHECK(std::isfinite(eval_eigenfunction(4000, 100.0, kDisk)));
  }

  TEST_CASE("mode cap") {
    CHECK(kind_of([] { eval_eigenfunction(mode_cap(kLine) + 1, 0.0, kLine); }) == ErrorKind::capability);
  }

  TEST_CASE("orthonormality") {
    const EigenBasis b1 = build_basis(kLine, 64, 1e-10);
    CHECK(b1.orthonormality_error <= 1e-10);
    CHECK(orthonormality_error(b1.values, b1.grid) <= 1e-10);
    const EigenBasis b2 = build_basis(kDisk, 32, 1e-8);
    CHECK(b2.orthonormality_error <= 1e-8);
    const EigenBasis b0 = build_basis(kLine, 0, 1e-10);
    CHECK(std::abs(orthonormality_error(b0.values, b0.grid)) <= 1e-10);
  }

  TEST_CASE("eigen residual") {
    const EigenBasis b = build_basis(kLine, 64, 1e-10);
    const BasisReport r = verify_basis(b, 64);
    CHECK(r.max_eigen_residual <= 1e-4);
    const EigenBasis b2 = build_basis(kDisk, 32, 1e-8);
    CHECK(verify_basis(b2, 32).max_eigen_residual <= 1e-4);
  }

  TEST_CASE("projection") {
    const EigenBasis b = build_basis(kLine, 16, 1e-10);
    std::vector<double> f(b.grid_points());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = b.values(2, j);
    const auto c = project(f, b);
    for (int n = 0; n <= 16; ++n) CHECK(std::abs(c[n] - (n == 2 ? 1.0 : 0.0)) <= 1e-8);
    const auto z = project(std::vector<double>(b.grid_points(), 0.0), b);
    for (double v : z) CHECK(v == 0.0);
    CHECK(kind_of([&] { project(std::vector<double>(3), b); }) == ErrorKind::shape);
  }

  TEST_CASE("lp norms") {
    const EigenBasis b = build_basis(kLine, 8, 1e-10);
    CHECK(std::abs(eigen_lp_norm(0, 2.0, b) - 1.0) <= 1e-10);
    CHECK(eigen_lp_norm(0, 4.0, b) == doctest::Approx(std::pow(2 * std::numbers::pi, -0.125)).epsilon(1e-10));
  }

  TEST_CASE("L^8 bound over n in [16, 512]") {
    const EigenBasis b = build_basis(kLine, 512, default_accuracy(kLine, 512));
    double lo = INFINITY, hi = 0;
    for (int n = 16; n <= 512; n += 8) {
      const double r = eigen_lp_norm(n, 8.0, b) * std::pow(b.lambdas[n], 1.0 / 6.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 3.0);
  }

  TEST_CASE("unreachable accuracy is a resolution error") {
    BasisOptions tight;
    tight.max_grid_points = 64;
    CHECK(kind_of([&] { build_basis(kLine, 200, 1e-10, tight); }) == ErrorKind::resolution);
  }
}
