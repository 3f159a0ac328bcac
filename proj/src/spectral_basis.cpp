#include "hgibbs/spectral_basis.hpp"

#include <cmath>
#include <numbers>

#include "hgibbs/errors.hpp"
#include "hgibbs/quadrature.hpp"

namespace hgibbs {

namespace {

constexpr int kLineCap = 65536;
constexpr int kRadialCap = 16384;
constexpr int kPanelOrder = 10;
constexpr double kRescale = 1e100;
constexpr double kLogRescale = 230.25850929940458;  // log(1e100)

bool is_line(const Geometry& g) { return g.dim == 1 && !g.radial; }

// exp(s) for the log-scale carried by the recurrences; values below the
// smallest normal double are flushed (true |h| < 1e-207 there).
double scale_factor(double s) { return s < -708.0 ? 0.0 : std::exp(s); }

struct HermiteTable {
  std::vector<double> up, down;  // sqrt(2/(n+1)), sqrt(n/(n+1))
  HermiteTable() : up(kLineCap), down(kLineCap) {
    for (int n = 0; n < kLineCap; ++n) {
      up[n] = std::sqrt(2.0 / (n + 1));
      down[n] = std::sqrt(static_cast<double>(n) / (n + 1));
    }
  }
};

const HermiteTable& hermite_table() {
  static const HermiteTable t;
  return t;
}

void hermite_functions(int n_max, double x, double* out) {
  const HermiteTable& tab = hermite_table();
  double log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
  double f = scale_factor(log_scale);
  double prev = 0.0, cur = 1.0;
  out[0] = f;
  for (int n = 0; n < n_max; ++n) {
    const double next = x * tab.up[n] * cur - tab.down[n] * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
      f = scale_factor(log_scale);
    }
    out[n + 1] = cur * f;
  }
}

void radial_functions(int n_max, double r, const Geometry& g, double* out) {
  const double a = g.laguerre_order();
  const double t = r * r;
  double log_scale = -0.5 * t + 0.5 * std::log(2.0 / g.sphere_area()) - 0.5 * std::lgamma(a + 1.0);
  double f = scale_factor(log_scale);
  double prev = 0.0, cur = 1.0;
  out[0] = f;
  for (int n = 0; n < n_max; ++n) {
    const double next =
        ((2.0 * n + 1.0 + a - t) * cur - std::sqrt(n * (n + a)) * prev) / std::sqrt((n + 1.0) * (n + 1.0 + a));
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
      f = scale_factor(log_scale);
    }
    out[n + 1] = cur * f;
  }
}

}  // namespace

int mode_cap(const Geometry& g) { return is_line(g) ? kLineCap : kRadialCap; }

void eval_eigenfunctions(int n_max, double x, const Geometry& g, double* out) {
  g.validate();
  require(n_max >= 0, ErrorKind::invalid_argument, "mode index must be nonnegative");
  require(n_max <= mode_cap(g), ErrorKind::capability,
          "mode " + std::to_string(n_max) + " exceeds cap " + std::to_string(mode_cap(g)));
  if (is_line(g)) {
    hermite_functions(n_max, x, out);
  } else {
    require(x >= 0.0, ErrorKind::invalid_argument, "radial evaluation needs r >= 0");
    radial_functions(n_max, x, g, out);
  }
}

double eval_eigenfunction(int n, double x, const Geometry& g) {
  require(n >= 0, ErrorKind::invalid_argument, "mode index must be nonnegative");
  require(n <= mode_cap(g), ErrorKind::capability,
          "mode " + std::to_string(n) + " exceeds cap " + std::to_string(mode_cap(g)));
  std::vector<double> buf(n + 1);
  eval_eigenfunctions(n, x, g, buf.data());
  return buf[n];
}

double default_extent(double lambda_max) { return 1.25 * lambda_max + 4.0; }

std::size_t initial_grid_points(const Geometry& g, double extent, double lambda_max) {
  if (is_line(g)) return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(2.0 * extent * lambda_max)));
  const auto panels = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(extent * lambda_max / 8.0)));
  return panels * kPanelOrder;
}

Grid make_grid(const Geometry& g, double extent, std::size_t points) {
  g.validate();
  require(extent > 0.0 && points > 0, ErrorKind::invalid_argument, "make_grid: empty grid");
  Grid grid;
  grid.geometry = g;
  grid.extent = extent;
  if (is_line(g)) {
    const double h = 2.0 * extent / static_cast<double>(points);
    grid.nodes.resize(points);
    grid.weights.assign(points, h);
    for (std::size_t j = 0; j < points; ++j) grid.nodes[j] = -extent + (j + 0.5) * h;
    return grid;
  }
  const int panels = static_cast<int>((points + kPanelOrder - 1) / kPanelOrder);
  QuadRule q = composite_gauss_legendre(0.0, extent, panels, kPanelOrder);
  const double area = g.sphere_area();
  grid.nodes = std::move(q.nodes);
  grid.weights = std::move(q.weights);
  for (std::size_t j = 0; j < grid.size(); ++j) grid.weights[j] *= area * std::pow(grid.nodes[j], g.dim - 1);
  return grid;
}

double grid_lp_power(const double* f, const Grid& grid, double p) {
  double s = 0.0;
  const std::size_t n = grid.size();
  if (p == 2.0) {
    for (std::size_t j = 0; j < n; ++j) s += grid.weights[j] * f[j] * f[j];
  } else if (p == 4.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double q = f[j] * f[j];
      s += grid.weights[j] * q * q;
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) s += grid.weights[j] * std::pow(std::abs(f[j]), p);
  }
  return s;
}

double default_accuracy(const Geometry& g, int n_max) { return (is_line(g) && n_max <= 128) ? 1e-10 : 1e-8; }

double orthonormality_error(const Eigen::MatrixXd& values, const Grid& grid) {
  const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), static_cast<Eigen::Index>(grid.size()));
  const Eigen::MatrixXd hw = values * w.asDiagonal();
  Eigen::MatrixXd gram = hw * values.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

EigenBasis build_basis(const Geometry& g, int n_max, double accuracy, const BasisOptions& opt) {
  g.validate();
  require(n_max >= 0, ErrorKind::invalid_argument, "n_max must be nonnegative");
  require(n_max <= mode_cap(g), ErrorKind::capability,
          "n_max " + std::to_string(n_max) + " exceeds cap " + std::to_string(mode_cap(g)));
  require(accuracy > 0.0, ErrorKind::invalid_argument, "accuracy must be positive");

  EigenBasis b;
  b.geometry = g;
  b.n_max = n_max;
  b.accuracy = accuracy;
  b.lambdas.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) b.lambdas[n] = eigenvalue(n, g);

  const double lmax = b.lambdas.back();
  const double extent = default_extent(lmax);
  std::size_t points = initial_grid_points(g, extent, lmax);
  std::vector<double> col(n_max + 1);
  double err = 0.0;
  for (;;) {
    const std::size_t bytes = points * static_cast<std::size_t>(n_max + 1) * sizeof(double);
    if (points > opt.max_grid_points || bytes > opt.max_bytes) {
      fail(ErrorKind::resolution, "orthonormality tolerance " + std::to_string(accuracy) +
                                      " not reached within grid limits (last error " + std::to_string(err) + ")");
    }
    Grid grid = make_grid(g, extent, points);
    Eigen::MatrixXd values(n_max + 1, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      eval_eigenfunctions(n_max, grid.nodes[j], g, col.data());
      for (int n = 0; n <= n_max; ++n) values(n, static_cast<Eigen::Index>(j)) = col[n];
    }
    err = orthonormality_error(values, grid);
    if (err <= accuracy) {
      b.grid = std::move(grid);
      b.values = std::move(values);
      b.orthonormality_error = err;
      return b;
    }
    points *= 2;
  }
}

std::vector<double> project(const std::vector<double>& f, const EigenBasis& basis) {
  require(f.size() == basis.grid.size(), ErrorKind::shape,
          "project: function has " + std::to_string(f.size()) + " samples, grid has " +
              std::to_string(basis.grid.size()));
  Eigen::VectorXd fw(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) fw[static_cast<Eigen::Index>(j)] = f[j] * basis.grid.weights[j];
  const Eigen::VectorXd c = basis.values * fw;
  return std::vector<double>(c.data(), c.data() + c.size());
}

double eigen_lp_norm(int n, double p, const EigenBasis& basis) {
  require(p >= 1.0, ErrorKind::invalid_argument, "p must be >= 1");
  require(n >= 0 && n <= basis.n_max, ErrorKind::invalid_argument, "mode outside the basis");
  const Eigen::VectorXd row = basis.values.row(n).transpose();
  return std::pow(grid_lp_power(row.data(), basis.grid, p), 1.0 / p);
}

double eigen_residual(int n, const Grid& grid, double step) {
  const Geometry& g = grid.geometry;
  const double lam2 = eigenvalue(n, g) * eigenvalue(n, g);
  std::vector<double> buf(n + 1);
  auto h = [&](double x) {
    eval_eigenfunctions(n, x, g, buf.data());
    return buf[n];
  };
  double worst = 0.0;
  for (double x : grid.nodes) {
    if (std::abs(x) > grid.extent - 3.0 * step) continue;
    if (!is_line(g) && x < 3.0 * step) continue;
    const double fm2 = h(x - 2 * step), fm1 = h(x - step), f0 = h(x), fp1 = h(x + step), fp2 = h(x + 2 * step);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * step * step);
    double lhs = -d2 + x * x * f0;
    if (!is_line(g)) {
      const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * step);
      lhs -= (g.dim - 1) / x * d1;
    }
    worst = std::max(worst, std::abs(lhs - lam2 * f0) / lam2);
  }
  return worst;
}

BasisReport verify_basis(const EigenBasis& basis, int residual_modes) {
  BasisReport r;
  r.dim = basis.geometry.dim;
  r.radial = basis.geometry.radial;
  r.n_max = basis.n_max;
  r.grid_points = basis.grid.size();
  r.extent = basis.grid.extent;
  r.max_orthonormality_error = orthonormality_error(basis.values, basis.grid);
  r.residual_modes = std::min(residual_modes, basis.n_max);
  for (int n = 0; n <= r.residual_modes; ++n)
    r.max_eigen_residual = std::max(r.max_eigen_residual, eigen_residual(n, basis.grid));
  return r;
}

}  // namespace hgibbs
