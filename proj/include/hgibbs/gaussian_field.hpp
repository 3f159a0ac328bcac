#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgibbs/geometry.hpp"
#include "hgibbs/rng.hpp"
#include "hgibbs/spectral_basis.hpp"
#include "hgibbs/stats.hpp"

namespace hgibbs {

/// Law of the coefficients g_n.  Both have E|g|^2 = 1; they differ in the
/// fourth moment: kappa = E(|g|^2 - 1)^2 is 2 for `real` (g ~ N(0,1)) and 1
/// for `circular_complex` (Re g, Im g ~ N(0,1/2)).
enum class GaussianLaw { real, circular_complex };

double chaos_constant(GaussianLaw law);
const char* to_string(GaussianLaw law);
GaussianLaw parse_law(const std::string& s);

struct McOptions {
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::uint64_t chunk_size = 1000;
  int threads = 0;
  GaussianLaw law = GaussianLaw::real;

  ChunkLayout layout() const { return ChunkLayout::for_samples(samples, chunk_size); }
};

struct FieldProvenance {
  bool sampled = false;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t sample = 0;
  GaussianLaw law = GaussianLaw::real;
};

struct FieldCoeffs {
  Geometry geometry;
  int n_cut = 0;
  std::vector<std::complex<double>> coeffs;
  FieldProvenance provenance;

  static FieldCoeffs deterministic(const Geometry& g, std::vector<std::complex<double>> c);
  static FieldCoeffs zero(const Geometry& g, int n_cut);
  /// Coefficient vector e_n scaled by `amp`.
  static FieldCoeffs mode(const Geometry& g, int n_cut, int n, std::complex<double> amp = 1.0);
  double l2_squared() const;
};

/// g_0..g_{count-1} of one sample.  Mode n reads normal slot n (real law) or
/// slots 2n, 2n+1 (complex law) relative to the stream's current position
/// base, so a shorter truncation is always a prefix of a longer one.
void draw_gaussians(RngStream& stream, GaussianLaw law, int count, std::complex<double>* out);

/// u_n = g_n / lambda_n, n <= N.
FieldCoeffs sample_field(const Geometry& g, int N, RngStream& stream, GaussianLaw law = GaussianLaw::real);
FieldCoeffs sample_field(const EigenBasis& basis, int N, RngStream& stream, GaussianLaw law = GaussianLaw::real);

/// sum_{n<=N} lambda_n^{-2}.
double sigma_integral(int N, const Geometry& g);
/// sum_{n<=N} lambda_n^{-2s}.
double inverse_power_sum(int N, const Geometry& g, double s);
/// sum |u_n|^2 - sigma_integral(N).
double wick_mass(const FieldCoeffs& f);
/// E[wick_mass^2] = kappa * sum_{n<=N} lambda_n^{-4}.
double wick_second_moment_exact(int N, const Geometry& g, GaussianLaw law = GaussianLaw::real);

struct WickMassStats {
  int n_cut = 0;
  double trace = 0.0;
  double second_moment = 0.0;
};
WickMassStats wick_mass_stats(int N, const Geometry& g, GaussianLaw law = GaussianLaw::real);

/// u(x_j) on the basis grid.
std::vector<std::complex<double>> synthesize(const FieldCoeffs& f, const EigenBasis& basis);
double lp_norm(const FieldCoeffs& f, double p, const EigenBasis& basis);
double sobolev_norm(const FieldCoeffs& f, double s);
double gns_ratio(const FieldCoeffs& f, double p, const EigenBasis& basis);
/// Violations of the admissibility conditions for gns_ratio.
std::vector<std::string> gns_violations(double p, const Geometry& g);

/// Row-major block of scaled coefficients u_n = g_n / lambda_n for a run of
/// consecutive samples.  `im` is empty for the real law.
struct CoeffBlock {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  bool complex() const { return im.size() > 0; }
  Eigen::Index rows() const { return re.rows(); }
};

/// Fills rows for samples first .. first+rows-1, modes 0..N.  Raw g_n are
/// returned when `lambdas` is null.
void fill_field_block(std::uint64_t seed, std::uint64_t first, Eigen::Index rows, int N, GaussianLaw law,
                      const double* lambdas, CoeffBlock& out);

CoeffBlock gather_rows(const CoeffBlock& b, const std::vector<Eigen::Index>& rows);
/// sum_n |block(r, n)|^2.
double row_mass(const CoeffBlock& b, Eigen::Index r);

/// For each row r and exponent p_k: out(r, k) = sum_j w_j |u_r(x_j)|^{p_k}
/// where u_r = sum_n block(r, n) h_n.  Only the first block.cols() modes of
/// the basis are used.
Eigen::MatrixXd lp_powers_batch(const CoeffBlock& block, const EigenBasis& basis, const std::vector<double>& ps);

/// Monte Carlo statistics of the random field used by the field-moments
/// command and the tests.
enum class FieldStatistic {
  wick_mass,               // W_N
  wick_mass_squared,       // W_N^2
  wick_increment_squared,  // (W_{N2} - W_N)^2
  negative_sobolev,        // ||u_N||_{H^{-param}}^2
  lp_power,                // ||u_N||_{L^param}^param (needs a basis)
};

const char* to_string(FieldStatistic s);

struct FieldMomentRequest {
  FieldStatistic stat = FieldStatistic::wick_mass;
  int N = 8;
  int N2 = 0;
  double param = 0.5;
};

McEstimate field_moment(const FieldMomentRequest& req, const Geometry& g, const EigenBasis* basis,
                        const McOptions& opt);

/// Closed-form expectation of the statistic when one exists.
std::optional<double> field_moment_exact(const FieldMomentRequest& req, const Geometry& g, GaussianLaw law);

}  // namespace hgibbs
