#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hgibbs {

/// Spatial setting of the harmonic oscillator -Laplacian + |x|^2.
/// d = 1 is the full line; d >= 2 is only supported on radial functions.
struct Geometry {
  int dim = 1;
  bool radial = false;

  static Geometry line() { return {1, false}; }
  static Geometry radial_space(int d) { return {d, true}; }

  /// Human readable list of violated constraints; empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;

  /// Area of the unit sphere S^{d-1} (2 for d = 1).
  double sphere_area() const;
  /// Laguerre order d/2 - 1 of the radial eigenfunctions.
  double laguerre_order() const { return 0.5 * dim - 1.0; }
  /// L^2-critical exponent 2 + 4/d.
  double critical_exponent() const { return 2.0 + 4.0 / dim; }
  /// Upper bound 2d/(d-2) on admissible exponents when d >= 3.
  std::optional<double> sobolev_limit() const;

  bool operator==(const Geometry&) const = default;
};

std::string describe(const Geometry& g);

/// lambda_n: sqrt(1 + 2n) on the line, sqrt(4n + d) for radial d >= 2.
double eigenvalue(int n, const Geometry& g);

}  // namespace hgibbs
