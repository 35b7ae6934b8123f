#include "qbm/gaussian_dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qbm {

namespace {

constexpr double kOverlapLimit = 1e-6;

// Normalized bivariate Gaussian density at offset u.
double gaussian_density(const Mat2& cov, const Vec2& u) {
  const double det = cov.determinant();
  const double q = u.dot(cov.inverse() * u);
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

double normal_density(double u, double var) {
  return std::exp(-0.5 * u * u / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

Mat2 free_flight(double mass, double t) {
  Mat2 r;
  r << 1.0, t / mass, 0.0, 1.0;
  return r;
}

void require_dynamics(double diffusion, double mass, double t) {
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw std::invalid_argument("diffusion must be >= 0");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw std::invalid_argument("mass must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("duration must be >= 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianState

GaussianState::GaussianState(const Vec2& mean, const Mat2& cov, double hbar)
    : mean_(mean), cov_(symmetrized(cov, "covariance")), hbar_(hbar) {
  if (!mean.allFinite()) throw std::invalid_argument("GaussianState: non-finite mean");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("GaussianState: hbar must be positive");
  const double det = cov_.determinant();
  if (!(cov_(0, 0) > 0.0) || !(det > 0.0)) {
    throw std::invalid_argument("GaussianState: covariance is not positive definite");
  }
  // det = a c - b^2 cancels badly for strongly correlated states, so the
  // slack scales with a c rather than with the bound.
  if (det < 0.25 * hbar * hbar - 1e-12 * std::max(0.25 * hbar * hbar, cov_(0, 0) * cov_(1, 1))) {
    std::ostringstream msg;
    msg << "GaussianState: det(cov) = " << det << " violates the uncertainty bound hbar^2/4 = "
        << 0.25 * hbar * hbar;
    throw std::invalid_argument(msg.str());
  }
}

GaussianState GaussianState::pure(double x0, double p0, double sigma_x, double hbar, double correlation) {
  if (!(sigma_x > 0.0)) throw std::invalid_argument("GaussianState::pure: sigma_x must be positive");
  if (!(std::abs(correlation) < 1.0)) throw std::invalid_argument("GaussianState::pure: |correlation| must be < 1");
  const double sigma_p = hbar / (2.0 * sigma_x * std::sqrt(1.0 - correlation * correlation));
  Mat2 cov;
  const double cxp = correlation * sigma_x * sigma_p;
  cov << sigma_x * sigma_x, cxp, cxp, sigma_p * sigma_p;
  return GaussianState(Vec2(x0, p0), cov, hbar);
}

double GaussianState::sigma_x() const { return std::sqrt(cov_(0, 0)); }
double GaussianState::sigma_p() const { return std::sqrt(cov_(1, 1)); }
double GaussianState::correlation() const { return cov_(0, 1) / std::sqrt(cov_(0, 0) * cov_(1, 1)); }

bool GaussianState::is_pure() const {
  const double bound = 0.25 * hbar_ * hbar_;
  return std::abs(cov_.determinant() - bound) <= 1e-9 * bound;
}

double GaussianState::wigner(double x, double p) const { return gaussian_density(cov_, Vec2(x, p) - mean_); }

// ---------------------------------------------------------------------------
// WignerExpansion

double WignerExpansion::value(double x, double p) const {
  const Vec2 alpha(x, p);
  double total = 0.0;
  for (const auto& term : terms_) {
    const Vec2 u = alpha - term.mean;
    const double g = gaussian_density(term.cov, u);
    total += (term.weight * std::polar(g, term.wavevector.dot(u))).real();
  }
  return total;
}

double WignerExpansion::mass() const {
  double total = 0.0;
  for (const auto& term : terms_) {
    const double damping = std::exp(-0.5 * term.wavevector.dot(term.cov * term.wavevector));
    total += (term.weight * damping).real();
  }
  return total;
}

double WignerExpansion::position_density(double x) const {
  double total = 0.0;
  for (const auto& term : terms_) {
    const Mat2& s = term.cov;
    const double kx = term.wavevector(0);
    const double kp = term.wavevector(1);
    const double amplitude = std::exp(-0.5 * kp * kp * s.determinant() / s(0, 0));
    const double k_eff = kx + s(0, 1) * kp / s(0, 0);
    const double u = x - term.mean(0);
    total += (term.weight * std::polar(amplitude * normal_density(u, s(0, 0)), k_eff * u)).real();
  }
  return total;
}

double WignerExpansion::momentum_density(double p) const {
  double total = 0.0;
  for (const auto& term : terms_) {
    const Mat2& s = term.cov;
    const double kx = term.wavevector(0);
    const double kp = term.wavevector(1);
    const double amplitude = std::exp(-0.5 * kx * kx * s.determinant() / s(1, 1));
    const double k_eff = kp + s(0, 1) * kx / s(1, 1);
    const double u = p - term.mean(1);
    total += (term.weight * std::polar(amplitude * normal_density(u, s(1, 1)), k_eff * u)).real();
  }
  return total;
}

WignerExpansion WignerExpansion::evolved(double diffusion, double mass, double t, double force) const {
  const PropagatorKernel kernel = propagator_kernel(diffusion, mass, t);
  const Mat2 r = kernel.shear();
  const Mat2 r_inv_t = r.inverse().transpose();
  const Mat2& c = kernel.covariance();
  const Vec2 drift(force * t * t / (2.0 * mass), force * t);
  const bool smoothing = c.cwiseAbs().maxCoeff() > 0.0;

  std::vector<WignerTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    WignerTerm next;
    next.mean = r * term.mean + drift;
    const Mat2 sheared = r * term.cov * r.transpose();
    const Vec2 k = r_inv_t * term.wavevector;
    if (!smoothing) {
      next.cov = sheared;
      next.wavevector = k;
      next.weight = term.weight;
    } else {
      // Convolving N(cov) e^{ik.u} with N(C) gives A * N(cov + C) e^{ik'.u}.
      const Mat2 total = sheared + c;
      const Vec2 k_out = total.inverse() * (sheared * k);
      const double log_damping = -0.5 * (k.dot(sheared * k) - k_out.dot(total * k_out));
      next.cov = 0.5 * (total + total.transpose());
      next.wavevector = k_out;
      next.weight = term.weight * std::exp(log_damping);
    }
    out.push_back(next);
  }
  return WignerExpansion(std::move(out));
}

WignerExpansion wigner_expansion(const GaussianState& state) {
  return WignerExpansion({WignerTerm{1.0, state.mean(), state.cov(), Vec2::Zero()}});
}

// ---------------------------------------------------------------------------
// CatState

WignerTerm cross_wigner_term(const GaussianState& g1, const GaussianState& g2) {
  const double hbar = g1.hbar();
  const Vec2 delta = g1.mean() - g2.mean();
  const Vec2 midpoint = 0.5 * (g1.mean() + g2.mean());
  // Oscillation (alpha - midpoint)^T J delta / hbar with J = [[0, 1], [-1, 0]].
  const Vec2 k(delta(1) / hbar, -delta(0) / hbar);
  // Constant phase from composing Weyl displacements.
  const double phase = (g2.x0() * g1.p0() - g2.p0() * g1.x0()) / (2.0 * hbar);
  return WignerTerm{std::polar(1.0, phase), midpoint, g1.cov(), k};
}

CatState::CatState(const GaussianState& packet1, const GaussianState& packet2, std::complex<double> amp2)
    : packet1_(packet1), packet2_(packet2), amp2_(amp2), norm_(0.0) {
  if (packet1.hbar() != packet2.hbar()) throw std::invalid_argument("CatState: packets must share hbar");
  const double scale = packet1.cov().cwiseAbs().maxCoeff();
  if ((packet1.cov() - packet2.cov()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("CatState: packets must have equal covariance");
  }
  if (!packet1.is_pure()) throw std::invalid_argument("CatState: packets must be pure (det cov = hbar^2/4)");
  if (!(std::abs(amp2) > 0.0) || !std::isfinite(std::abs(amp2))) {
    throw std::invalid_argument("CatState: amp2 must be finite and nonzero");
  }
  const double ov = std::abs(overlap());
  if (!(ov < kOverlapLimit)) {
    std::ostringstream msg;
    msg << "CatState: branch overlap |<g1|g2>| = " << ov << " is not below " << kOverlapLimit;
    throw std::invalid_argument(msg.str());
  }
  norm_ = 1.0 + std::norm(amp2) + 2.0 * (std::conj(amp2) * overlap()).real();

  WignerTerm cross = cross_wigner_term(packet1, packet2);
  cross.weight *= 2.0 * std::conj(amp2) / norm_;
  wigner_ = WignerExpansion({
      WignerTerm{1.0 / norm_, packet1.mean(), packet1.cov(), Vec2::Zero()},
      WignerTerm{std::norm(amp2) / norm_, packet2.mean(), packet2.cov(), Vec2::Zero()},
      cross,
  });
}

CatState CatState::symmetric(double separation, double sigma_x, double hbar, double p0) {
  return CatState(GaussianState::pure(-0.5 * separation, p0, sigma_x, hbar),
                  GaussianState::pure(0.5 * separation, p0, sigma_x, hbar));
}

double CatState::separation() const { return std::abs(packet1_.x0() - packet2_.x0()); }

std::complex<double> CatState::overlap() const {
  const WignerTerm cross = cross_wigner_term(packet1_, packet2_);
  return cross.weight * std::exp(-0.5 * cross.wavevector.dot(cross.cov * cross.wavevector));
}

double cat_wigner_value(const CatState& cat, double x, double p) { return cat.wigner().value(x, p); }

// ---------------------------------------------------------------------------
// Propagation

Mat2 PropagatorKernel::shear() const { return free_flight(mass_, t_); }

Vec2 PropagatorKernel::reverse_shear(const Vec2& alpha) const {
  return Vec2(alpha(0) - alpha(1) * t_ / mass_, alpha(1));
}

PropagatorKernel propagator_kernel(double diffusion, double mass, double t) {
  require_dynamics(diffusion, mass, t);
  Mat2 c;
  c << t * t / (3.0 * mass * mass), t / (2.0 * mass), t / (2.0 * mass), 1.0;
  return PropagatorKernel(2.0 * diffusion * t * c, t, mass);
}

GaussianState propagate_gaussian(const GaussianState& state, double diffusion, double force, double mass,
                                 double t) {
  if (!std::isfinite(force)) throw std::invalid_argument("force must be finite");
  const PropagatorKernel kernel = propagator_kernel(diffusion, mass, t);
  const Mat2 r = kernel.shear();
  const Vec2 mean = r * state.mean() + Vec2(force * t * t / (2.0 * mass), force * t);
  const Mat2 cov = r * state.cov() * r.transpose() + kernel.covariance();
  return GaussianState(mean, 0.5 * (cov + cov.transpose()), state.hbar());
}

GaussianState propagate_gaussian(const GaussianState& state, double diffusion, double mass, double t) {
  return propagate_gaussian(state, diffusion, 0.0, mass, t);
}

GaussianState propagate_gaussian_with_force(const GaussianState& state, double force, double mass, double t) {
  return propagate_gaussian(state, 0.0, force, mass, t);
}

CatEvolution propagate_cat(const CatState& cat, double diffusion, double mass, double t, double force) {
  const double p1 = cat.packet1().p0();
  const double p2 = cat.packet2().p0();
  if (std::abs(p1 - p2) > 1e-12 * std::max({1.0, std::abs(p1), std::abs(p2)})) {
    throw std::invalid_argument(
        "propagate_cat: branch momenta differ; the decoherence factor needs a static separation (use the grid "
        "integrator)");
  }
  const double hbar = cat.hbar();
  const double l = cat.separation();
  const std::complex<double> gamma =
      std::exp(std::complex<double>(-diffusion * l * l * t / (hbar * hbar), force * l * t / hbar));
  return CatEvolution{
      propagate_gaussian(cat.packet1(), diffusion, force, mass, t),
      propagate_gaussian(cat.packet2(), diffusion, force, mass, t),
      gamma,
      cat.wigner().evolved(diffusion, mass, t, force),
  };
}

double decoherence_time(double diffusion, double separation, double hbar) {
  if (!(diffusion >= 0.0)) throw std::invalid_argument("decoherence_time: diffusion must be >= 0");
  if (!(separation > 0.0)) throw std::invalid_argument("decoherence_time: separation must be positive");
  if (!(hbar > 0.0)) throw std::invalid_argument("decoherence_time: hbar must be positive");
  if (diffusion == 0.0) return std::numeric_limits<double>::infinity();
  return hbar * hbar / (diffusion * separation * separation);
}

double off_diagonal_decay(double x, double x_prime, double diffusion, double t, double hbar) {
  if (!(diffusion >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("off_diagonal_decay: D and t must be >= 0");
  const double d = x - x_prime;
  return std::exp(-diffusion * t * d * d / (hbar * hbar));
}

}  // namespace qbm
