#include "qbm/qbm_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qbm {

Mat2 levi_civita_upper() {
  Mat2 e;
  e << 0.0, 1.0, -1.0, 0.0;
  return e;
}

Mat2 levi_civita_lower() {
  Mat2 e;
  e << 0.0, -1.0, 1.0, 0.0;
  return e;
}

Mat2 symmetrized(const Mat2& a, const std::string& what) {
  if (!a.allFinite()) throw std::invalid_argument(what + ": non-finite entry");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * scale) {
    throw std::invalid_argument(what + ": matrix is not symmetric");
  }
  return 0.5 * (a + a.transpose());
}

LindbladSpec::LindbladSpec(const Mat2& hmat, std::vector<CVec2> lvecs, double hbar)
    : hmat_(symmetrized(hmat, "hmat")), lvecs_(std::move(lvecs)), hbar_(hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("hbar must be positive");
  for (const auto& l : lvecs_) {
    if (!l.allFinite()) throw std::invalid_argument("lvecs: non-finite entry");
  }
}

std::optional<QbmViolation> validate_qbm(const Mat2& dmat, double lambda) {
  if (!dmat.allFinite() || !std::isfinite(lambda)) {
    return QbmViolation{QbmViolationKind::NonFinite, "non-finite diffusion matrix or lambda"};
  }
  const double a = dmat(0, 0);
  const double b = 0.5 * (dmat(0, 1) + dmat(1, 0));
  const double c = dmat(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double smallest = mean - radius;
  const double scale = std::max(1.0, mean + radius);
  if (smallest < -1e-12 * scale) {
    std::ostringstream msg;
    msg << "diffusion matrix has negative eigenvalue " << smallest;
    return QbmViolation{QbmViolationKind::NotPositiveSemidefinite, msg.str()};
  }
  const double det = a * c - b * b;
  const double lambda2 = lambda * lambda;
  if (det < lambda2 - 1e-12 * std::max(1.0, lambda2)) {
    std::ostringstream msg;
    msg << "det(D) = " << det << " is below lambda^2 = " << lambda2;
    return QbmViolation{QbmViolationKind::DeterminantBelowLambdaSquared, msg.str()};
  }
  return std::nullopt;
}

QBMParams::QBMParams(const Mat2& dmat, double lambda, const Mat2& hmat, double hbar)
    : dmat_(symmetrized(dmat, "dmat")), lambda_(lambda), hmat_(symmetrized(hmat, "hmat")), hbar_(hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw std::invalid_argument("hbar must be positive");
  if (auto violation = validate_qbm(dmat_, lambda_)) throw std::invalid_argument(violation->message);
}

Mat2 QBMParams::fmat() const { return hmat_ + levi_civita_lower() * lambda_; }

Mat2 QBMParams::dmat_raised() const {
  const Mat2 e = levi_civita_upper();
  return e * dmat_ * e.transpose();
}

QBMParams qbm_from_lindblad(const LindbladSpec& spec) {
  Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
  for (const auto& l : spec.lvecs()) sum += l.conjugate() * l.transpose();
  // Rounding can leave det marginally below lambda^2 on the boundary; the
  // slack in validate_qbm absorbs it.
  return QBMParams(sum.real(), sum(0, 1).imag(), spec.hmat(), spec.hbar());
}

Mat2 rotation(double theta) {
  Mat2 r;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r << c, s, -s, c;
  return r;
}

DiffusionAxes diagonalize_diffusion(const QBMParams& params) {
  const Mat2 d = params.dmat_raised();
  const double a = d(0, 0);
  const double b = d(0, 1);
  const double c = d(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
  double theta = 0.0;
  if (radius > 1e-14 * scale) {
    theta = 0.5 * std::atan2(2.0 * b, a - c);
    if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  }
  return {theta, mean + radius, std::max(0.0, mean - radius)};
}

}  // namespace qbm
