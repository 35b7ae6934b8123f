#pragma once

// Analytic Gaussian and two-branch cat states in phase space, and their
// exact propagation under frictionless momentum diffusion
//
//   dW/dt = -(p/m) dW/dx - F dW/dp + D d^2W/dp^2
//
// whose solution is a free-flight shear followed by convolution with a
// Gaussian kernel of covariance C_t.

#include <complex>
#include <vector>

#include "qbm/qbm_model.hpp"

namespace qbm {

class GaussianState {
 public:
  /// Throws std::invalid_argument unless cov is symmetric positive definite
  /// with det(cov) >= hbar^2/4, up to 1e-12 of max(hbar^2/4, cov_xx cov_pp).
  GaussianState(const Vec2& mean, const Mat2& cov, double hbar);

  /// Heisenberg-saturating state with position width sigma_x and
  /// position-momentum correlation coefficient `correlation` in (-1, 1).
  static GaussianState pure(double x0, double p0, double sigma_x, double hbar, double correlation = 0.0);

  const Vec2& mean() const { return mean_; }
  const Mat2& cov() const { return cov_; }
  double hbar() const { return hbar_; }
  double x0() const { return mean_(0); }
  double p0() const { return mean_(1); }
  double sigma_x() const;
  double sigma_p() const;
  double correlation() const;
  /// det(cov) within 1e-9 relative of hbar^2/4.
  bool is_pure() const;
  /// Negative position-momentum correlation.
  bool is_contractive() const { return cov_(0, 1) < 0.0; }

  double wigner(double x, double p) const;

 private:
  Vec2 mean_;
  Mat2 cov_;
  double hbar_;
};

/// One term of a Wigner function written as a (possibly complex-weighted,
/// plane-wave-modulated) Gaussian:
///   Re[ weight * N(alpha; mean, cov) * exp(i k.(alpha - mean)) ].
/// Incoherent branches have k = 0; interference terms carry k != 0.
struct WignerTerm {
  std::complex<double> weight;
  Vec2 mean;
  Mat2 cov;
  Vec2 wavevector;
};

/// A Wigner function expressed as a finite sum of WignerTerms. Closed under
/// the exact QBM propagation, so it serves as the analytic reference for
/// rasterized grids.
class WignerExpansion {
 public:
  WignerExpansion() = default;
  explicit WignerExpansion(std::vector<WignerTerm> terms) : terms_(std::move(terms)) {}

  const std::vector<WignerTerm>& terms() const { return terms_; }

  double value(double x, double p) const;
  /// Exact phase-space integral.
  double mass() const;
  /// P(x) = integral over p.
  double position_density(double x) const;
  /// P(p) = integral over x.
  double momentum_density(double p) const;

  /// Exact solution after time t with diffusion D, mass m and uniform force F.
  WignerExpansion evolved(double diffusion, double mass, double t, double force = 0.0) const;

 private:
  std::vector<WignerTerm> terms_;
};

WignerExpansion wigner_expansion(const GaussianState& state);

class CatState {
 public:
  /// Superposition |g1> + amp2 |g2> (normalized internally). The packets
  /// must be pure, share cov and hbar, and overlap below 1e-6; throws
  /// std::invalid_argument reporting the overlap otherwise.
  CatState(const GaussianState& packet1, const GaussianState& packet2, std::complex<double> amp2 = 1.0);

  /// Two packets of width sigma_x at x = +-L/2 with momentum p0.
  static CatState symmetric(double separation, double sigma_x, double hbar, double p0 = 0.0);

  const GaussianState& packet1() const { return packet1_; }
  const GaussianState& packet2() const { return packet2_; }
  std::complex<double> amp2() const { return amp2_; }
  double hbar() const { return packet1_.hbar(); }
  /// |x0(1) - x0(2)|.
  double separation() const;
  /// <g2|g1>.
  std::complex<double> overlap() const;
  /// <psi|psi> of the unnormalized superposition.
  double norm() const { return norm_; }
  const WignerExpansion& wigner() const { return wigner_; }

 private:
  GaussianState packet1_;
  GaussianState packet2_;
  std::complex<double> amp2_;
  double norm_;
  WignerExpansion wigner_;
};

/// Weyl-symbol of |g1><g2| for pure Gaussians of equal covariance, as a
/// single complex WignerTerm with unit weight.
WignerTerm cross_wigner_term(const GaussianState& g1, const GaussianState& g2);

double cat_wigner_value(const CatState& cat, double x, double p);

class PropagatorKernel {
 public:
  PropagatorKernel(const Mat2& covariance, double t, double mass) : cov_(covariance), t_(t), mass_(mass) {}

  /// Gaussian smoothing covariance C_t.
  const Mat2& covariance() const { return cov_; }
  double time() const { return t_; }
  double mass() const { return mass_; }
  /// Forward free-flight shear R_t = [[1, t/m], [0, 1]].
  Mat2 shear() const;
  /// R_{-t}(x, p) = (x - p t / m, p).
  Vec2 reverse_shear(const Vec2& alpha) const;

 private:
  Mat2 cov_;
  double t_;
  double mass_;
};

/// C_t = 2 D t [[t^2/(3 m^2), t/(2m)], [t/(2m), 1]]. Throws on D < 0,
/// t < 0 or m <= 0.
PropagatorKernel propagator_kernel(double diffusion, double mass, double t);

/// Mean follows free flight; cov -> R_t cov R_t^T + C_t.
GaussianState propagate_gaussian(const GaussianState& state, double diffusion, double mass, double t);

/// Mean shifted by (F t^2 / 2m, F t) on top of free flight; no diffusion.
GaussianState propagate_gaussian_with_force(const GaussianState& state, double force, double mass, double t);

/// Force and diffusion together: force mean shift plus diffusive covariance.
GaussianState propagate_gaussian(const GaussianState& state, double diffusion, double force, double mass,
                                 double t);

struct CatEvolution {
  GaussianState branch1;
  GaussianState branch2;
  /// exp(-D L^2 t / hbar^2 + i F L t / hbar) with L the initial separation.
  std::complex<double> gamma;
  /// Exact evolved Wigner function (branches plus damped interference).
  WignerExpansion wigner;
};

/// Throws std::invalid_argument when the branch momenta differ, since the
/// closed-form decoherence factor assumes a static separation.
CatEvolution propagate_cat(const CatState& cat, double diffusion, double mass, double t, double force = 0.0);

/// hbar^2 / (D L^2); +infinity when D == 0 (never decoheres).
double decoherence_time(double diffusion, double separation, double hbar);

/// exp(-D t (x - x')^2 / hbar^2).
double off_diagonal_decay(double x, double x_prime, double diffusion, double t, double hbar);

}  // namespace qbm
