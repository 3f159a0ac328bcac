#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "hgibbs/geometry.hpp"

namespace hgibbs {

/// Largest mode index accepted by the point evaluators.
int mode_cap(const Geometry& g);

/// L^2(R^d)-normalized eigenfunction h_n at x (radial: x = r >= 0).
double eval_eigenfunction(int n, double x, const Geometry& g);

/// h_0(x) ... h_{n_max}(x) written to out[0..n_max].
void eval_eigenfunctions(int n_max, double x, const Geometry& g, double* out);

/// Quadrature grid.  d = 1: midpoint rule on [-L, L].  Radial: composite
/// Gauss-Legendre on [0, L] with weights carrying |S^{d-1}| r^{d-1}.
struct Grid {
  Geometry geometry;
  std::vector<double> nodes;
  std::vector<double> weights;
  double extent = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// Half-width covering the turning point of a mode with eigenvalue lambda_max.
double default_extent(double lambda_max);
/// `points` is rounded up to a multiple of the panel order in the radial case.
Grid make_grid(const Geometry& g, double extent, std::size_t points);
/// Initial node count resolving frequencies up to lambda_max.
std::size_t initial_grid_points(const Geometry& g, double extent, double lambda_max);

/// Weighted sum  sum_j w_j |f_j|^p.
double grid_lp_power(const double* f, const Grid& grid, double p);
inline double grid_lp_power(const std::vector<double>& f, const Grid& grid, double p) {
  return grid_lp_power(f.data(), grid, p);
}

struct BasisOptions {
  std::size_t max_grid_points = std::size_t{1} << 21;
  std::size_t max_bytes = std::size_t{1536} << 20;
};

/// Default orthonormality tolerance for a cutoff: 1e-10 up to 128 modes on
/// the line, 1e-8 above and for radial bases.
double default_accuracy(const Geometry& g, int n_max);

class EigenBasis {
 public:
  Geometry geometry;
  int n_max = 0;
  std::vector<double> lambdas;
  Grid grid;
  /// values(n, j) = h_n(x_j).
  Eigen::MatrixXd values;
  double accuracy = 0.0;
  double orthonormality_error = 0.0;

  std::size_t grid_points() const { return grid.size(); }
};

/// Refines the grid until max |<h_n,h_m> - delta_nm| <= accuracy.
EigenBasis build_basis(const Geometry& g, int n_max, double accuracy, const BasisOptions& opt = {});

double orthonormality_error(const Eigen::MatrixXd& values, const Grid& grid);

/// Quadrature coefficients <f, h_n> for n <= n_max of a grid function.
std::vector<double> project(const std::vector<double>& f, const EigenBasis& basis);

double eigen_lp_norm(int n, double p, const EigenBasis& basis);

/// max over interior sample points of |(L - lambda_n^2) h_n| / lambda_n^2,
/// using fourth-order differences with step `step` on point evaluations.
double eigen_residual(int n, const Grid& grid, double step = 1e-3);

struct BasisReport {
  int dim = 1;
  bool radial = false;
  int n_max = 0;
  std::size_t grid_points = 0;
  double extent = 0.0;
  double max_orthonormality_error = 0.0;
  double max_eigen_residual = 0.0;
  int residual_modes = 0;
};

BasisReport verify_basis(const EigenBasis& basis, int residual_modes = 64);

}  // namespace hgibbs
