#pragma once

#include <functional>
#include <vector>

namespace hgibbs {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Composite Gauss-Legendre rule on [a, b]: `panels` equal panels with
/// `order` points each (order in {10, 20}).
QuadRule composite_gauss_legendre(double a, double b, int panels, int order = 10);

/// Adaptive Gauss-Kronrod integral of f over [a, b] to absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol);

}  // namespace hgibbs
