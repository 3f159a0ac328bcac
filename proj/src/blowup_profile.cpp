#include <cmath>
#include <numbers>

#include "hgibbs/blowup_drift.hpp"
#include "hgibbs/errors.hpp"
#include "hgibbs/quadrature.hpp"

namespace hgibbs {

namespace {

bool is_line(const Geometry& g) { return g.dim == 1 && !g.radial; }

// int_{1/2}^{1} q(rho) d rho on a fixed fine rule; the bump is flat to all
// orders at both ends, so Gauss-Legendre converges quickly.
const QuadRule& bump_rule() {
  static const QuadRule q = composite_gauss_legendre(0.5, 1.0, 64, 20);
  return q;
}

}  // namespace

double annular_bump(double rho) {
  const double s = 4.0 * std::abs(rho) - 3.0;
  if (!(std::abs(s) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

BumpProfile BumpProfile::make(const Geometry& g) {
  g.validate();
  BumpProfile b;
  b.geometry = g;
  const QuadRule& q = bump_rule();
  double m = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double c = annular_bump(q.nodes[k]);
    m += q.weights[k] * c * c * (is_line(g) ? 2.0 : g.sphere_area() * std::pow(q.nodes[k], g.dim - 1));
  }
  b.amplitude = 1.0 / std::sqrt(m);
  return b;
}

double BumpProfile::frequency_second_moment() const {
  const QuadRule& q = bump_rule();
  double m = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double v = fourier(q.nodes[k]);
    const double rho = q.nodes[k];
    m += q.weights[k] * v * v * rho * rho *
         (is_line(geometry) ? 2.0 : geometry.sphere_area() * std::pow(rho, geometry.dim - 1));
  }
  return m;
}

double BumpProfile::value(double r) const {
  r = std::abs(r);
  const int panels = 8 + static_cast<int>(std::ceil(r / (2.0 * std::numbers::pi)));
  const QuadRule q = composite_gauss_legendre(0.5, 1.0, panels, 20);
  double s = 0.0;
  if (is_line(geometry)) {
    for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * annular_bump(q.nodes[k]) * std::cos(r * q.nodes[k]);
    return amplitude * 2.0 * s / std::sqrt(2.0 * std::numbers::pi);
  }
  const double nu = 0.5 * geometry.dim - 1.0;
  if (r < 1e-8) {
    for (std::size_t k = 0; k < q.size(); ++k)
      s += q.weights[k] * annular_bump(q.nodes[k]) * std::pow(q.nodes[k], geometry.dim - 1);
    return amplitude * s / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
  }
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double rho = q.nodes[k];
    s += q.weights[k] * annular_bump(rho) * std::cyl_bessel_j(nu, r * rho) * std::pow(rho, nu + 1.0);
  }
  return amplitude * std::pow(r, -nu) * s;
}

double ProfileFM::projected_mass() const {
  double s = 0.0;
  for (double c : spectral) s += c * c;
  return s;
}

double ProfileFM::spectral_sobolev(double s) const {
  double acc = 0.0;
  for (std::size_t n = 0; n < spectral.size(); ++n)
    acc += std::pow(eigenvalue(static_cast<int>(n), geometry), 2.0 * s) * spectral[n] * spectral[n];
  return acc;
}

std::vector<double> profile_projections(double M, const Geometry& g, int n_max) {
  g.validate();
  require(M >= 1.0, ErrorKind::invalid_argument, "M must be >= 1");
  require(n_max >= 0, ErrorKind::invalid_argument, "n_max must be nonnegative");
  const BumpProfile f = BumpProfile::make(g);
  const double lmax = eigenvalue(n_max, g);
  // About one panel per oscillation of h_{n_max} across [M/2, M].
  const int panels = std::max(8, static_cast<int>(std::ceil(0.5 * M * lmax / (2.0 * std::numbers::pi))));
  const QuadRule q = composite_gauss_legendre(0.5 * M, M, panels, 20);
  std::vector<double> acc(n_max + 1, 0.0), h(n_max + 1);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double xi = q.nodes[k];
    double w = q.weights[k] * annular_bump(xi / M);
    if (w == 0.0) continue;
    if (!is_line(g)) w *= std::pow(xi, g.dim - 1);
    eval_eigenfunctions(n_max, xi, g, h.data());
    for (int n = 0; n <= n_max; ++n) acc[n] += w * h[n];
  }
  std::vector<double> out(n_max + 1, 0.0);
  if (is_line(g)) {
    const double c = 2.0 * f.amplitude / std::sqrt(M);
    for (int n = 0; n <= n_max; n += 2) out[n] = ((n / 2) % 2 ? -c : c) * acc[n];
  } else {
    const double c = g.sphere_area() * f.amplitude * std::pow(M, -0.5 * g.dim);
    for (int n = 0; n <= n_max; ++n) out[n] = (n % 2 ? -c : c) * acc[n];
  }
  return out;
}

Grid profile_grid(double M, const Geometry& g, int N) {
  // The profile decays like exp(-c sqrt(M|x|)); 1500/M keeps the neglected
  // mass far below 1e-6.
  const double extent = std::max(default_extent(eigenvalue(N, g)), 1500.0 / M);
  const auto points = static_cast<std::size_t>(std::ceil((is_line(g) ? 2.0 : 1.0) * extent * 2.0 * M));
  return make_grid(g, extent, std::max<std::size_t>(points, 64));
}

ProfileFM build_profile(double M, const Grid& grid, int n_max) {
  const Geometry& g = grid.geometry;
  g.validate();
  require(M >= 1.0, ErrorKind::invalid_argument, "M must be >= 1");
  const double spacing = is_line(g) ? 2.0 * grid.extent / static_cast<double>(grid.size())
                                    : 10.0 * grid.extent / static_cast<double>(grid.size()) / 10.0;
  require(spacing * M <= 1.6, ErrorKind::resolution,
          "grid spacing " + std::to_string(spacing) + " too coarse for profile scale M = " + std::to_string(M));
  ProfileFM pf;
  pf.geometry = g;
  pf.M = M;
  pf.f = BumpProfile::make(g);
  pf.grid = grid;
  const std::size_t G = grid.size();
  pf.grid_values.assign(G, 0.0);
  const double scale = std::pow(M, 0.5 * g.dim);
  if (is_line(g)) {
    // Midpoint nodes are symmetric: x_{G-1-j} = -x_j.
    for (std::size_t j = 0; j < (G + 1) / 2; ++j) {
      const double v = scale * pf.f.value(M * grid.nodes[j]);
      pf.grid_values[j] = v;
      pf.grid_values[G - 1 - j] = v;
    }
  } else {
    for (std::size_t j = 0; j < G; ++j) pf.grid_values[j] = scale * pf.f.value(M * grid.nodes[j]);
  }
  pf.l2_norm = std::sqrt(grid_lp_power(pf.grid_values, grid, 2.0));
  if (n_max >= 0) pf.spectral = profile_projections(M, g, n_max);
  return pf;
}

ProfileFM build_profile(double M, const EigenBasis& basis) { return build_profile(M, basis.grid, basis.n_max); }

int default_mode_cutoff(int M, const Geometry& g, double factor) {
  require(M >= 1, ErrorKind::invalid_argument, "M must be >= 1");
  require(factor >= 1.0, ErrorKind::invalid_argument, "mode factor must be >= 1");
  const double m2 = static_cast<double>(M) * M;
  const double base = is_line(g) ? std::ceil((m2 - 1.0) / 2.0) : std::ceil((m2 - g.dim) / 4.0);
  return std::max(M, static_cast<int>(std::ceil(std::max(base, 1.0) * factor)));
}

}  // namespace hgibbs
