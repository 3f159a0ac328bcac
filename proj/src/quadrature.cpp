#include "hgibbs/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hgibbs/errors.hpp"

namespace hgibbs {

namespace {

// Full symmetric node set of the Boost rule on [-1, 1].
template <unsigned N>
void reference_rule(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& b = G::weights();
  x.clear();
  w.clear();
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    x.push_back(-a[i]);
    w.push_back(b[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    x.push_back(a[i]);
    w.push_back(b[i]);
  }
}

}  // namespace

QuadRule composite_gauss_legendre(double a, double b, int panels, int order) {
  require(panels >= 1, ErrorKind::invalid_argument, "composite_gauss_legendre: panels must be >= 1");
  require(b > a, ErrorKind::invalid_argument, "composite_gauss_legendre: empty interval");
  std::vector<double> rx, rw;
  if (order == 10) {
    reference_rule<10>(rx, rw);
  } else if (order == 20) {
    reference_rule<20>(rx, rw);
  } else {
    fail(ErrorKind::invalid_argument, "composite_gauss_legendre: order must be 10 or 20");
  }
  QuadRule q;
  q.nodes.reserve(rx.size() * panels);
  q.weights.reserve(rx.size() * panels);
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (std::size_t i = 0; i < rx.size(); ++i) {
      q.nodes.push_back(mid + 0.5 * h * rx[i]);
      q.weights.push_back(0.5 * h * rw[i]);
    }
  }
  return q;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  if (b <= a) return 0.0;
  double err = 0.0;
  // Relative tolerance is left loose; the absolute target is checked below.
  const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 30, 1e-13, &err);
  require(err <= abs_tol || err <= 1e-12 * std::abs(val), ErrorKind::resolution,
          "integrate_adaptive: requested accuracy not reached");
  return val;
}

}  // namespace hgibbs
