#pragma once

// Two-branch interferometer channel, outcome statistics and Chernoff
// discrimination between diffusion (or force) hypotheses.

#include <cmath>
#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "qbm/gaussian_dynamics.hpp"
#include "qbm/sql_limits.hpp"

namespace qbm {

/// Probability density sampled on a uniform grid.
class SampledDistribution {
 public:
  /// Throws unless the density is nonnegative and integrates (midpoint sum
  /// times spacing) to 1 within 1e-6.
  SampledDistribution(double x0, double spacing, std::vector<double> density);

  /// Rescales an arbitrary nonnegative sample vector to unit mass.
  static SampledDistribution normalized(double x0, double spacing, std::vector<double> density);

  double x0() const { return x0_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return density_.size(); }
  double x(std::size_t i) const { return x0_ + static_cast<double>(i) * spacing_; }
  const std::vector<double>& density() const { return density_; }

 private:
  double x0_;
  double spacing_;
  std::vector<double> density_;
};

class DecoherenceFactor {
 public:
  /// Throws when |gamma| > 1 (beyond 1e-12).
  explicit DecoherenceFactor(std::complex<double> gamma);

  std::complex<double> gamma() const { return gamma_; }
  double s() const { return 0.0 - std::log(std::abs(gamma_)); }
  double theta() const { return std::arg(gamma_); }

 private:
  std::complex<double> gamma_;
};

struct TwoLevelChannel {
  DecoherenceFactor gamma;
};

/// rho_12 -> gamma rho_12, rho_21 -> conj(gamma) rho_21. Throws on inputs
/// that are not Hermitian, unit-trace and positive semidefinite (1e-10).
Eigen::Matrix2cd apply_channel(const TwoLevelChannel& channel, const Eigen::Matrix2cd& rho);

DecoherenceFactor decoherence_factor_from_config(const ExperimentConfig& config);

struct OutcomeProbabilities {
  double plus;
  double minus;
};

/// P_+- = (1 +- Re gamma) / 2.
OutcomeProbabilities interferometer_probabilities(std::complex<double> gamma);

/// -ln min_{alpha in [0,1]} sum_i p_i^alpha q_i^(1-alpha) over indices where
/// both masses are positive. Golden-section search to 1e-8 in alpha.
/// Returns +infinity when the supports do not overlap.
double chernoff_exponent(const std::vector<double>& p, const std::vector<double>& q);

/// Chernoff information between two densities on the same grid.
double chernoff_exponent(const SampledDistribution& p, const SampledDistribution& q);

/// Alternative dynamics competing with the configured (D, F).
struct Hypothesis {
  double diffusion = 0.0;
  double force = 0.0;
};

/// Chernoff exponent between final position densities P(x) under the
/// configured (D, F) and under `alternative`, each sampled at `samples`
/// points spanning both means +- 10 sigma.
double detection_error_exponent(const GaussianState& prep, const ExperimentConfig& config,
                                const Hypothesis& alternative, std::size_t samples = 512);
double detection_error_exponent(const GaussianState& prep, const ExperimentConfig& config, double d_alt,
                                std::size_t samples = 512);

/// Chernoff exponent between the interferometer outcome distributions
/// (P_+, P_-) under the two hypotheses, using the cat's separation for L.
double detection_error_exponent(const CatState& prep, const ExperimentConfig& config,
                                const Hypothesis& alternative);
double detection_error_exponent(const CatState& prep, const ExperimentConfig& config, double d_alt);

struct SearchOptions {
  std::size_t n_sigma = 41;
  std::size_t n_r = 41;
  /// sigma_x = sigma_opt * exp(u), u in [-log_span, log_span].
  double log_span = 2.0;
  double r_max = 0.999;
  std::size_t samples = 512;
};

struct SurfacePoint {
  double sigma_x;
  double r;
  double exponent;
};

struct PreparationSearch {
  GaussianState best;
  double best_exponent;
  /// Row-major by sigma_x, then r.
  std::vector<SurfacePoint> surface;
  /// Correlation grid step, the resolution for "within one cell" claims.
  double r_step;
};

/// Grid search over Heisenberg-saturating Gaussians centered at the origin.
/// r spans [0, r_max] unless allow_contractive, then [-r_max, r_max]. Ties
/// resolve to the smallest sigma_x, then the smallest r.
PreparationSearch optimize_gaussian_preparation(const ExperimentConfig& config, const Hypothesis& alternative,
                                                bool allow_contractive, const SearchOptions& options = {});
PreparationSearch optimize_gaussian_preparation(const ExperimentConfig& config, double d_alt,
                                                bool allow_contractive, const SearchOptions& options = {});

/// CSV `sigma_x,r,exponent` with a header line.
void write_surface(std::ostream& out, const PreparationSearch& search);

}  // namespace qbm
