#include "qbm/sql_limits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qbm {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + ": must be a positive finite number");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require_positive(m, "m");
  require_positive(T, "T");
  require_positive(hbar, "hbar");
  if (L) require_positive(*L, "L");
  if (!std::isfinite(F)) throw std::invalid_argument("F: must be finite");
  if (!(D >= 0.0) || !std::isfinite(D)) throw std::invalid_argument("D: must be a finite number >= 0");
}

double ExperimentConfig::separation() const {
  if (!L) throw std::invalid_argument("L: required but not set");
  return *L;
}

double force_sql(double m, double T, double hbar) {
  require_positive(m, "m");
  require_positive(T, "T");
  require_positive(hbar, "hbar");
  return 2.0 * std::sqrt(hbar * m / (T * T * T));
}

double diffusion_sql(double m, double T, double hbar) {
  require_positive(m, "m");
  require_positive(T, "T");
  require_positive(hbar, "hbar");
  return 9.0 * hbar * m / (8.0 * T * T);
}

double d_min(double T, double L, double hbar) {
  require_positive(T, "T");
  require_positive(L, "L");
  require_positive(hbar, "hbar");
  return hbar * hbar / (T * L * L);
}

double measured_spread(double sigma, double m, double T, double hbar) {
  const double disp = hbar * T / (2.0 * m * sigma);
  return std::hypot(sigma, disp);
}

OptimalWidths optimal_widths(double m, double T, double hbar) {
  require_positive(m, "m");
  require_positive(T, "T");
  require_positive(hbar, "hbar");
  const double prep = std::sqrt(hbar * T / (2.0 * m));
  return {prep, hbar / (2.0 * prep), hbar * T / (2.0 * m * prep), std::sqrt(hbar * T / m)};
}

DiffusionSpreads diffusion_spreads(double diffusion, double T, double m) {
  if (!(diffusion >= 0.0)) throw std::invalid_argument("D: must be >= 0");
  if (!(T >= 0.0)) throw std::invalid_argument("T: must be >= 0");
  require_positive(m, "m");
  return {std::sqrt(2.0 * diffusion * T), std::sqrt(8.0 * diffusion * T * T * T) / (3.0 * m)};
}

std::complex<double> decoherence_gamma(const ExperimentConfig& config) {
  config.validate();
  const double L = config.separation();
  const double s = config.D * L * L * config.T / (config.hbar * config.hbar);
  const double theta = config.F * L * config.T / config.hbar;
  return std::polar(std::exp(-s), theta);
}

HbarScaling hbar_scaling(const ExperimentConfig& config, double kappa) {
  require_positive(kappa, "kappa");
  config.separation();
  ExperimentConfig scaled = config;
  scaled.hbar = kappa * config.hbar;
  scaled.F = kappa * config.F;
  scaled.D = kappa * kappa * config.D;
  return {scaled, decoherence_gamma(config), decoherence_gamma(scaled)};
}

}  // namespace qbm
