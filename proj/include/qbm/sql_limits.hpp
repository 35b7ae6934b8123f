#pragma once

// Heuristic standard-quantum-limit quantities for a free test mass and the
// hbar -> 0 rescaling under which classical signatures vanish while the
// interferometric decoherence factor stays fixed.

#include <complex>
#include <optional>

namespace qbm {

struct ExperimentConfig {
  double m = 1.0;
  double T = 1.0;
  double hbar = 1.0;
  std::optional<double> L;
  double F = 0.0;
  double D = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Throws std::invalid_argument naming `L` when absent.
  double separation() const;
};

/// 2 sqrt(hbar m / T^3).
double force_sql(double m, double T, double hbar);

/// 9 hbar m / (8 T^2).
double diffusion_sql(double m, double T, double hbar);

/// hbar^2 / (T L^2).
double d_min(double T, double L, double hbar);

struct OptimalWidths {
  double sigma_x_prep;
  double sigma_p_prep;
  double sigma_x_disp;
  double sigma_x_meas;
};

/// Preparation width minimizing the measured spread
/// sqrt(sigma^2 + (hbar T / 2 m sigma)^2), and the resulting spreads.
OptimalWidths optimal_widths(double m, double T, double hbar);

/// Measured spread for preparation width sigma.
double measured_spread(double sigma, double m, double T, double hbar);

struct DiffusionSpreads {
  double sigma_p;
  double sigma_x;
};

/// sigma_p^2 = 2 D T, sigma_x = sqrt(8 D T^3) / (3 m).
DiffusionSpreads diffusion_spreads(double diffusion, double T, double m);

/// exp(-D L^2 T / hbar^2 + i F L T / hbar). Requires L.
std::complex<double> decoherence_gamma(const ExperimentConfig& config);

struct HbarScaling {
  ExperimentConfig scaled;
  std::complex<double> gamma_before;
  std::complex<double> gamma_after;
};

/// hbar -> kappa hbar, F -> kappa F, D -> kappa^2 D with m, T, L fixed.
HbarScaling hbar_scaling(const ExperimentConfig& config, double kappa);

}  // namespace qbm
