#include "qbm/detection_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qbm/wigner_grid.hpp"

namespace qbm {

SampledDistribution::SampledDistribution(double x0, double spacing, std::vector<double> density)
    : x0_(x0), spacing_(spacing), density_(std::move(density)) {
  if (!(spacing > 0.0)) throw std::invalid_argument("SampledDistribution: spacing must be positive");
  if (density_.empty()) throw std::invalid_argument("SampledDistribution: no samples");
  double total = 0.0;
  for (double d : density_) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("SampledDistribution: negative or non-finite density");
    total += d;
  }
  total *= spacing_;
  if (std::abs(total - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "SampledDistribution: total probability " << total << " differs from 1";
    throw std::invalid_argument(msg.str());
  }
}

SampledDistribution SampledDistribution::normalized(double x0, double spacing, std::vector<double> density) {
  double total = 0.0;
  for (double d : density) total += d;
  total *= spacing;
  if (!(total > 0.0)) throw std::invalid_argument("SampledDistribution: zero total mass");
  for (double& d : density) d /= total;
  return SampledDistribution(x0, spacing, std::move(density));
}

DecoherenceFactor::DecoherenceFactor(std::complex<double> gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag()) || std::abs(gamma) > 1.0 + 1e-12) {
    throw std::invalid_argument("DecoherenceFactor: |gamma| must not exceed 1");
  }
}

Eigen::Matrix2cd apply_channel(const TwoLevelChannel& channel, const Eigen::Matrix2cd& rho) {
  if (!rho.allFinite()) throw std::invalid_argument("apply_channel: non-finite entry");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("apply_channel: rho is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw std::invalid_argument("apply_channel: trace of rho is not 1");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(rho);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("apply_channel: rho is not positive semidefinite");
  Eigen::Matrix2cd out = rho;
  out(0, 1) *= channel.gamma.gamma();
  out(1, 0) *= std::conj(channel.gamma.gamma());
  return out;
}

DecoherenceFactor decoherence_factor_from_config(const ExperimentConfig& config) {
  return DecoherenceFactor(decoherence_gamma(config));
}

OutcomeProbabilities interferometer_probabilities(std::complex<double> gamma) {
  if (std::abs(gamma) > 1.0 + 1e-12) throw std::invalid_argument("interferometer_probabilities: |gamma| > 1");
  const double plus = 0.5 * (1.0 + gamma.real());
  return {plus, 1.0 - plus};
}

double chernoff_exponent(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("chernoff_exponent: distributions differ in length");
  if (p == q) return 0.0;
  std::vector<double> lp;
  std::vector<double> lq;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("chernoff_exponent: negative mass");
    if (p[i] > 0.0 && q[i] > 0.0) {
      lp.push_back(std::log(p[i]));
      lq.push_back(std::log(q[i]));
    }
  }
  if (lp.empty()) return std::numeric_limits<double>::infinity();

  auto objective = [&](double alpha) {
    double sum = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) sum += std::exp(alpha * lp[i] + (1.0 - alpha) * lq[i]);
    return sum;
  };

  // The objective is log-convex in alpha, so golden-section search finds
  // the interior minimum; endpoints cover boundary optima.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-8) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double best = std::min({objective(0.5 * (a + b)), objective(0.0), objective(1.0)});
  return std::max(0.0, -std::log(best));
}

double chernoff_exponent(const SampledDistribution& p, const SampledDistribution& q) {
  const double tol = 1e-9 * std::max(1.0, std::abs(p.x0()));
  if (p.size() != q.size() || std::abs(p.spacing() - q.spacing()) > 1e-12 * p.spacing() ||
      std::abs(p.x0() - q.x0()) > tol) {
    throw std::invalid_argument("chernoff_exponent: distributions are not on a common grid");
  }
  std::vector<double> mp(p.density());
  std::vector<double> mq(q.density());
  for (double& v : mp) v *= p.spacing();
  for (double& v : mq) v *= q.spacing();
  return chernoff_exponent(mp, mq);
}

namespace {

SampledDistribution sample_position(const GaussianState& state, double x0, double spacing, std::size_t n) {
  std::vector<double> density(n);
  const double mu = state.x0();
  const double var = state.cov()(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x0 + static_cast<double>(i) * spacing - mu;
    density[i] = std::exp(-0.5 * u * u / var);
  }
  return SampledDistribution::normalized(x0, spacing, std::move(density));
}

}  // namespace

double detection_error_exponent(const GaussianState& prep, const ExperimentConfig& config,
                                const Hypothesis& alternative, std::size_t samples) {
  config.validate();
  if (samples < 2) throw std::invalid_argument("detection_error_exponent: need at least 2 samples");
  if (!(alternative.diffusion >= 0.0)) throw std::invalid_argument("D_alt: must be >= 0");
  const GaussianState null_state = propagate_gaussian(prep, config.D, config.F, config.m, config.T);
  const GaussianState alt_state =
      propagate_gaussian(prep, alternative.diffusion, alternative.force, config.m, config.T);
  const double sigma = std::max(null_state.sigma_x(), alt_state.sigma_x());
  const double lo = std::min(null_state.x0(), alt_state.x0()) - 10.0 * sigma;
  const double hi = std::max(null_state.x0(), alt_state.x0()) + 10.0 * sigma;
  const double spacing = (hi - lo) / static_cast<double>(samples - 1);
  return chernoff_exponent(sample_position(null_state, lo, spacing, samples),
                           sample_position(alt_state, lo, spacing, samples));
}

double detection_error_exponent(const GaussianState& prep, const ExperimentConfig& config, double d_alt,
                                std::size_t samples) {
  return detection_error_exponent(prep, config, Hypothesis{d_alt, config.F}, samples);
}

double detection_error_exponent(const CatState& prep, const ExperimentConfig& config, const Hypothesis& alternative) {
  ExperimentConfig null_config = config;
  null_config.L = prep.separation();
  ExperimentConfig alt_config = null_config;
  alt_config.D = alternative.diffusion;
  alt_config.F = alternative.force;
  const auto p = interferometer_probabilities(decoherence_factor_from_config(null_config).gamma());
  const auto q = interferometer_probabilities(decoherence_factor_from_config(alt_config).gamma());
  return chernoff_exponent(std::vector<double>{p.plus, p.minus}, std::vector<double>{q.plus, q.minus});
}

double detection_error_exponent(const CatState& prep, const ExperimentConfig& config, double d_alt) {
  return detection_error_exponent(prep, config, Hypothesis{d_alt, config.F});
}

PreparationSearch optimize_gaussian_preparation(const ExperimentConfig& config, const Hypothesis& alternative,
                                                bool allow_contractive, const SearchOptions& options) {
  config.validate();
  if (options.n_sigma < 2 || options.n_r < 2) throw std::invalid_argument("optimize_gaussian_preparation: grid too small");
  if (!(options.r_max > 0.0 && options.r_max < 1.0)) throw std::invalid_argument("optimize_gaussian_preparation: r_max must be in (0, 1)");
  const double sigma_opt = optimal_widths(config.m, config.T, config.hbar).sigma_x_prep;
  const double r_lo = allow_contractive ? -options.r_max : 0.0;
  const double r_step = (options.r_max - r_lo) / static_cast<double>(options.n_r - 1);
  const double u_step = 2.0 * options.log_span / static_cast<double>(options.n_sigma - 1);

  std::vector<SurfacePoint> surface;
  surface.reserve(options.n_sigma * options.n_r);
  std::size_t best = 0;
  for (std::size_t i = 0; i < options.n_sigma; ++i) {
    const double sigma = sigma_opt * std::exp(-options.log_span + static_cast<double>(i) * u_step);
    for (std::size_t j = 0; j < options.n_r; ++j) {
      // Pin the centre of the symmetric range to exactly zero.
      double r = r_lo + static_cast<double>(j) * r_step;
      if (std::abs(r) < 0.5 * r_step * 1e-9) r = 0.0;
      const GaussianState prep = GaussianState::pure(0.0, 0.0, sigma, config.hbar, r);
      const double exponent = detection_error_exponent(prep, config, alternative, options.samples);
      surface.push_back({sigma, r, exponent});
      if (exponent > surface[best].exponent) best = surface.size() - 1;
    }
  }
  const auto& top = surface[best];
  return {GaussianState::pure(0.0, 0.0, top.sigma_x, config.hbar, top.r), top.exponent, std::move(surface), r_step};
}

PreparationSearch optimize_gaussian_preparation(const ExperimentConfig& config, double d_alt, bool allow_contractive,
                                                const SearchOptions& options) {
  return optimize_gaussian_preparation(config, Hypothesis{d_alt, config.F}, allow_contractive, options);
}

void write_surface(std::ostream& out, const PreparationSearch& search) {
  out << "sigma_x,r,exponent\n";
  for (const auto& point : search.surface) {
    out << format_double(point.sigma_x) << ',' << format_double(point.r) << ',' << format_double(point.exponent)
        << '\n';
  }
}

}  // namespace qbm
