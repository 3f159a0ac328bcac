#pragma once

#include <string>
#include <vector>

#include "hgibbs/gaussian_field.hpp"
#include "hgibbs/geometry.hpp"
#include "hgibbs/spectral_basis.hpp"
#include "hgibbs/stats.hpp"

namespace hgibbs {

/// Where the Wick-mass cutoff sits: 1_{|W|<=K} exp(R_p)  or  exp(R_p 1_{|W|<=K}).
enum class IndicatorPlacement { outside, inside };

struct GibbsSpec {
  Geometry geometry;
  double p = 4.0;
  double K = 1.0;
  int N = 16;
  double r = 1.0;
  IndicatorPlacement placement = IndicatorPlacement::outside;

  std::vector<std::string> violations() const;
  void validate() const;
  /// p >= 2 + 4/d: the truncated densities are not uniformly integrable.
  bool non_normalizable() const { return p >= geometry.critical_exponent(); }
  std::string describe() const;
};

/// Closed form of ||h_0||_{L^p}^p = pi^{-pd/4} (2 pi / p)^{d/2}.
double h0_lp_power(double p, const Geometry& g);

/// E_mu[ 1_{|W_N| <= K} exp((r/p) ||u_N||_p^p) ]  (or the inside variant).
McEstimate estimate_partition(const GibbsSpec& spec, const EigenBasis& basis, const McOptions& opt);

/// Same integrand with r replaced by r_power.
McEstimate density_moment(const GibbsSpec& spec, const EigenBasis& basis, double r_power, const McOptions& opt);

/// E_mu[ (r/p) ||u_N||_p^p 1_{|W_N| <= K} ].
McEstimate potential_expectation(const GibbsSpec& spec, const EigenBasis& basis, const McOptions& opt);

/// One-mode partition function by quadrature over g_0 (absolute accuracy 1e-8).
double exact_partition_n0(const GibbsSpec& spec, GaussianLaw law = GaussianLaw::real);

/// P(W_N in [K - eps, K + eps]).
McEstimate boundary_probability(int N, double K, double eps, const Geometry& g, const McOptions& opt);

/// Narrow / wide window probabilities from the same samples.  ratio estimates
/// P(narrow)/P(wide); its standard error is the binomial one conditional on
/// the wide window.
struct BoundaryRatio {
  McEstimate narrow;
  McEstimate wide;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double expected = 0.0;  // eps_narrow / eps_wide
};
BoundaryRatio boundary_ratio(int N, double K, double eps_narrow, double eps_wide, const Geometry& g,
                             const McOptions& opt);

/// P(|sum_{N<n<=T} (|g_n|^2 - 1)/lambda_n^2| <= K/2  and  (1/p)||u_(N,T]||_p^p <= 1).
McEstimate tail_set_probability(int N, double K, double p, int tail_cut, const EigenBasis& basis,
                                const McOptions& opt);

/// Default tail_cut = 8N.
inline int default_tail_cut(int N) { return 8 * std::max(N, 1); }

/// Wick-mass variance of the modes beyond tail_cut, kappa sum_{n>T} lambda_n^{-4}.
double tail_neglected_variance(int tail_cut, const Geometry& g, GaussianLaw law = GaussianLaw::real);

}  // namespace hgibbs
