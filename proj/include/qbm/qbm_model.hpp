#pragma once

// General ideal quantum Brownian motion (QBM) generator: a quadratic
// Hamiltonian plus Lindblad operators linear in (x, p), reparameterized
// into a diffusion matrix D_ab, a dissipation scalar lambda and the drift
// matrix F_ab = H_ab + eps_ab * lambda.
//
// Phase-space index convention: 0 = x, 1 = p.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qbm {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;

/// Upper-index Levi-Civita symbol, eps^{xp} = +1.
Mat2 levi_civita_upper();

/// Lower-index Levi-Civita symbol, eps_{px} = +1.
Mat2 levi_civita_lower();

/// Returns (A + A^T)/2 when the asymmetry is below 1e-12 relative to the
/// largest entry; throws std::invalid_argument naming `what` otherwise.
Mat2 symmetrized(const Mat2& a, const std::string& what);

class LindbladSpec {
 public:
  LindbladSpec(const Mat2& hmat, std::vector<CVec2> lvecs, double hbar);

  const Mat2& hmat() const { return hmat_; }
  const std::vector<CVec2>& lvecs() const { return lvecs_; }
  double hbar() const { return hbar_; }

 private:
  Mat2 hmat_;
  std::vector<CVec2> lvecs_;
  double hbar_;
};

enum class QbmViolationKind { NonFinite, NotPositiveSemidefinite, DeterminantBelowLambdaSquared };

struct QbmViolation {
  QbmViolationKind kind;
  std::string message;
};

/// Checks that `dmat` is positive semidefinite and det(dmat) >= lambda^2.
/// The determinant test accepts det >= lambda^2 - 1e-12 * max(1, lambda^2).
/// Returns nullopt when valid.
std::optional<QbmViolation> validate_qbm(const Mat2& dmat, double lambda);

class QBMParams {
 public:
  /// Throws std::invalid_argument when the parameters are not a valid
  /// generator (see validate_qbm).
  QBMParams(const Mat2& dmat, double lambda, const Mat2& hmat, double hbar);

  const Mat2& dmat() const { return dmat_; }
  double lambda() const { return lambda_; }
  const Mat2& hmat() const { return hmat_; }
  double hbar() const { return hbar_; }

  /// F_ab = H_ab + eps_ab * lambda.
  Mat2 fmat() const;
  /// D^{ab} = eps^{ac} eps^{bd} D_cd.
  Mat2 dmat_raised() const;

 private:
  Mat2 dmat_;
  double lambda_;
  Mat2 hmat_;
  double hbar_;
};

/// D_ab = Re sum_i conj(L_a) L_b and lambda = Im sum_i conj(L_x) L_p.
QBMParams qbm_from_lindblad(const LindbladSpec& spec);

struct DiffusionAxes {
  double theta;  // radians, in (-pi/2, pi/2]
  double d1;     // d1 >= d2 >= 0
  double d2;
};

/// R(theta) D^{ab} R(theta)^T = diag(d1, d2) with R(theta) = [[c, s], [-s, c]].
/// Degenerate eigenvalues give theta = 0.
DiffusionAxes diagonalize_diffusion(const QBMParams& params);

/// Phase-space rotation R(theta) = [[cos, sin], [-sin, cos]].
Mat2 rotation(double theta);

}  // namespace qbm
