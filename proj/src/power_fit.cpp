#include "hgibbs/power_fit.hpp"

#include <cmath>

#include "hgibbs/errors.hpp"

namespace hgibbs {

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::shape, "fit_power_law: x and y differ in length");
  require(x.size() >= 3, ErrorKind::invalid_argument, "fit_power_law: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0 && std::isfinite(x[i]) && std::isfinite(y[i]), ErrorKind::domain,
            "fit_power_law: data must be finite and positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  require(sxx > 0, ErrorKind::domain, "fit_power_law: x values are all equal");
  PowerFit f;
  f.exponent = sxy / sxx;
  f.log_prefactor = my - f.exponent * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = ly[i] - (f.log_prefactor + f.exponent * lx[i]);
    ssr += r * r;
  }
  // A constant series is fitted exactly.
  f.r_squared = syy > 0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
  return f;
}

}  // namespace hgibbs
