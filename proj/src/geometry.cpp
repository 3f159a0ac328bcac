#include "hgibbs/geometry.hpp"

#include <cmath>
#include <numbers>

#include "hgibbs/errors.hpp"

namespace hgibbs {

std::vector<std::string> Geometry::violations() const {
  std::vector<std::string> out;
  if (dim < 1) out.push_back("dim must be >= 1");
  if (dim >= 2 && !radial)
    out.push_back("dim >= 2 requires radial symmetry (only radial measures are supported)");
  return out;
}

void Geometry::validate() const {
  auto v = violations();
  if (!v.empty()) fail(ErrorKind::config, v.front());
}

double Geometry::sphere_area() const {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

std::optional<double> Geometry::sobolev_limit() const {
  if (dim <= 2) return std::nullopt;
  return 2.0 * dim / (dim - 2.0);
}

std::string describe(const Geometry& g) {
  if (g.dim == 1 && !g.radial) return "line";
  return "radial d=" + std::to_string(g.dim);
}

double eigenvalue(int n, const Geometry& g) {
  require(n >= 0, ErrorKind::invalid_argument, "mode index must be nonnegative");
  if (g.dim == 1 && !g.radial) return std::sqrt(1.0 + 2.0 * n);
  return std::sqrt(4.0 * n + g.dim);
}

}  // namespace hgibbs
