#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qbm/qbm_model.hpp"

using namespace qbm;

namespace {

Mat2 mat(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

Mat2 free_particle(double mass) { return mat(0.0, 0.0, 0.0, 1.0 / mass); }

// Builds params whose raised-index diffusion equals `raised`.
QBMParams with_raised(const Mat2& raised) {
  const Mat2 e = levi_civita_upper();
  return QBMParams(e.transpose() * raised * e, 0.0, Mat2::Zero(), 1.0);
}

}  // namespace

TEST_CASE("momentum diffusion from a single position Lindblad vector") {
  const double d = 1.0;
  LindbladSpec spec(free_particle(1.0), {CVec2(std::sqrt(2.0 * d), 0.0)}, 1.0);
  const QBMParams q = qbm_from_lindblad(spec);
  CHECK(q.dmat()(0, 0) == doctest::Approx(2.0));
  CHECK(q.dmat()(0, 1) == 0.0);
  CHECK(q.dmat()(1, 1) == 0.0);
  CHECK(q.lambda() == 0.0);
  CHECK(q.dmat_raised()(1, 1) == doctest::Approx(2.0 * d));
  CHECK(q.dmat_raised()(0, 0) == 0.0);
}

TEST_CASE("no Lindblad vectors gives Hamiltonian evolution") {
  const QBMParams q = qbm_from_lindblad(LindbladSpec(free_particle(2.0), {}, 1.0));
  CHECK(q.dmat().isZero());
  CHECK(q.lambda() == 0.0);
  CHECK(q.fmat().isApprox(free_particle(2.0)));
}

TEST_CASE("boundary case det D = lambda^2 is accepted") {
  const QBMParams q = qbm_from_lindblad(LindbladSpec(Mat2::Zero(), {CVec2(1.0, std::complex<double>(0.0, 1.0))}, 1.0));
  CHECK(q.dmat().isApprox(Mat2::Identity()));
  CHECK(q.lambda() == doctest::Approx(1.0));
  CHECK(q.dmat().determinant() == doctest::Approx(q.lambda() * q.lambda()));
  // F_ab = H_ab + eps_ab lambda with eps_px = +1.
  CHECK(q.fmat()(1, 0) == doctest::Approx(1.0));
  CHECK(q.fmat()(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("validate_qbm names the failed condition") {
  auto det = validate_qbm(mat(0.5, 0, 0, 0.5), 1.0);
  REQUIRE(det);
  CHECK(det->kind == QbmViolationKind::DeterminantBelowLambdaSquared);

  CHECK_FALSE(validate_qbm(mat(2, 0, 0, 0), 0.0));

  auto psd = validate_qbm(mat(1, 2, 2, 1), 0.0);
  REQUIRE(psd);
  CHECK(psd->kind == QbmViolationKind::NotPositiveSemidefinite);
  CHECK(psd->message.find("-1") != std::string::npos);

  auto nan = validate_qbm(mat(std::nan(""), 0, 0, 1), 0.0);
  REQUIRE(nan);
  CHECK(nan->kind == QbmViolationKind::NonFinite);

  // Slack on the determinant boundary.
  CHECK_FALSE(validate_qbm(Mat2::Identity(), 1.0 + 1e-14));
  CHECK(validate_qbm(Mat2::Identity(), 1.0 + 1e-9));
}

TEST_CASE("symmetrization absorbs rounding noise and rejects real asymmetry") {
  CHECK_NOTHROW(QBMParams(mat(1, 1e-14, 0, 1), 0.0, Mat2::Zero(), 1.0));
  CHECK_THROWS_AS(QBMParams(mat(1, 0.1, 0, 1), 0.0, Mat2::Zero(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LindbladSpec(mat(0, 1, 0, 0), {}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LindbladSpec(Mat2::Zero(), {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(QBMParams(mat(1, 2, 2, 1), 0.0, Mat2::Zero(), 1.0), std::invalid_argument);
}

TEST_CASE("diagonalize_diffusion examples") {
  SUBCASE("already diagonal") {
    const auto axes = diagonalize_diffusion(with_raised(mat(2, 0, 0, 0)));
    CHECK(axes.theta == 0.0);
    CHECK(axes.d1 == doctest::Approx(2.0));
    CHECK(axes.d2 == doctest::Approx(0.0));
  }
  SUBCASE("equal entries") {
    const auto axes = diagonalize_diffusion(with_raised(mat(1, 1, 1, 1)));
    CHECK(axes.theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(axes.d1 == doctest::Approx(2.0));
    CHECK(axes.d2 == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("axis swap") {
    const auto axes = diagonalize_diffusion(with_raised(mat(0, 0, 0, 2)));
    CHECK(axes.theta == doctest::Approx(std::numbers::pi / 2));
    CHECK(axes.d1 == doctest::Approx(2.0));
  }
  SUBCASE("degenerate tie rule") {
    const auto axes = diagonalize_diffusion(with_raised(mat(3, 0, 0, 3)));
    CHECK(axes.theta == 0.0);
  }
}

TEST_CASE("random Lindblad vectors always give valid generators") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<CVec2> l;
    const int count = 1 + trial % 3;
    for (int i = 0; i < count; ++i) l.emplace_back(std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng)));
    const QBMParams q = qbm_from_lindblad(LindbladSpec(Mat2::Zero(), l, 1.0));
    CHECK_FALSE(validate_qbm(q.dmat(), q.lambda()));

    // Reassembly of the diagonalization.
    const auto axes = diagonalize_diffusion(q);
    const Mat2 r = rotation(axes.theta);
    const Mat2 back = r.transpose() * Eigen::Vector2d(axes.d1, axes.d2).asDiagonal() * r;
    const double scale = q.dmat_raised().cwiseAbs().maxCoeff();
    CHECK((back - q.dmat_raised()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(axes.d1 >= axes.d2);
    CHECK(axes.d2 >= 0.0);
    CHECK(axes.theta > -std::numbers::pi / 2);
    CHECK(axes.theta <= std::numbers::pi / 2);

    // lambda and det D are invariant under a phase-space rotation of the vectors.
    const double phi = n(rng);
    const Eigen::Matrix2cd rot = rotation(phi).cast<std::complex<double>>();
    std::vector<CVec2> rotated;
    for (const auto& v : l) rotated.push_back(rot * v);
    const QBMParams qr = qbm_from_lindblad(LindbladSpec(Mat2::Zero(), rotated, 1.0));
    CHECK(qr.lambda() == doctest::Approx(q.lambda()).epsilon(1e-10));
    CHECK(qr.dmat().determinant() == doctest::Approx(q.dmat().determinant()).epsilon(1e-10));
  }
}
