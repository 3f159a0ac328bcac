#pragma once

#include <vector>

namespace hgibbs {

/// y ~ exp(log_prefactor) * x^exponent, least squares on (log x, log y).
struct PowerFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 1.0;
};

/// Requires at least three points with x, y > 0 (domain error otherwise).
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hgibbs
