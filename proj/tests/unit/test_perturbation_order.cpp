#include <doctest.h>

#include <cmath>
#include <random>

#include "qbm/perturbation_order.hpp"

using namespace qbm;

namespace {

const std::complex<double> I(0.0, 1.0);

CMat pauli(char which) {
  CMat m(2, 2);
  if (which == 'x') m << 0, 1, 1, 0;
  if (which == 'y') m << 0, -I, I, 0;
  if (which == 'z') m << 1, 0, 0, -1;
  return m;
}

CMat random_matrix(std::size_t n, std::mt19937_64& rng, double norm) {
  std::normal_distribution<double> d;
  CMat m(n, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = {d(rng), d(rng)};
  return m * (norm / Eigen::JacobiSVD<CMat>(m).singularValues()(0));
}

// e^{-iHt} via the Hermitian eigendecomposition.
CMat unitary_by_eig(const CMat& h, double t) {
  const Eigen::SelfAdjointEigenSolver<CMat> eig(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phases(k) = std::polar(1.0, -eig.eigenvalues()(k) * t);
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("matrix exponential against eigendecomposition") {
  const BipartiteSystem sys = BipartiteSystem::random(2, 3, 42);
  const CMat h = sys.hamiltonian(0.3);
  CHECK((expm(CMat(-I * 1.7 * h)) - unitary_by_eig(h, 1.7)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Zassenhaus terms") {
  const CMat a = I * pauli('z');
  const CMat b = I * pauli('x');
  const auto t = zassenhaus_terms(a, b);
  CHECK((t.c2 - I * pauli('y')).cwiseAbs().maxCoeff() < 1e-15);

  const auto zero = zassenhaus_terms(pauli('z'), 2.0 * pauli('z'));
  CHECK(zero.c2.isZero());
  CHECK(zero.c3.isZero());
  CHECK_THROWS_AS(zassenhaus_terms(CMat::Zero(2, 2), CMat::Zero(3, 3)), std::invalid_argument);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const CMat x = random_matrix(4, rng, 1.0);
    const CMat y = random_matrix(4, rng, 1.0);
    std::vector<double> h{0.1, 0.05, 0.025}, r;
    for (double step : h) r.push_back(zassenhaus_residual(x, y, step));
    CHECK(loglog_fit(h, r).slope == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("peeled evolution") {
  const BipartiteSystem sys = BipartiteSystem::random(2, 3, 42);
  CHECK((peeled_evolution(sys, 0.0, 1.3) - CMat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

  const CMat u = peeled_evolution(sys, 0.2, 1.0);
  CHECK((u.adjoint() * u - CMat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);

  // U'_t = e^{-i eps t H~} + O(eps^2).
  const CMat h = effective_interaction(sys, 1.0);
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3}, err;
  for (double e : eps) {
    const CMat approx = expm(CMat(-I * e * h));
    err.push_back(Eigen::JacobiSVD<CMat>(peeled_evolution(sys, e, 1.0) - approx).singularValues()(0));
  }
  CHECK(loglog_fit(eps, err).slope == doctest::Approx(2.0).epsilon(0.05));

  // Local unitaries leave the Schmidt coefficients alone.
  const CVec a = peeled_evolution(sys, 0.3, 1.0) * sys.psi0();
  const CVec b = full_evolution(sys, 0.3, 1.0) * sys.psi0();
  CHECK(schmidt_purity_deficit(a, 2, 3) == doctest::Approx(schmidt_purity_deficit(b, 2, 3)).epsilon(1e-10));
}

TEST_CASE("effective interaction of a product coupling at short times") {
  std::mt19937_64 rng(8);
  const BipartiteSystem base = BipartiteSystem::random(2, 3, 5);
  CMat ha = random_matrix(2, rng, 1.0);
  ha = (0.5 * (ha + ha.adjoint())).eval();
  CMat hb = random_matrix(3, rng, 1.0);
  hb = (0.5 * (hb + hb.adjoint())).eval();
  const BipartiteSystem sys(base.h_probe(), base.h_env(), kron(ha, hb), base.probe0(), base.env0());
  const double t = 1e-4;
  const CVec n = first_order_state(sys, 0.5, t);
  const std::complex<double> eb = base.env0().dot(hb * base.env0());
  CVec expect = base.probe0() - I * 0.5 * t * eb * (ha * base.probe0());
  expect /= expect.norm();
  CHECK((n - expect).norm() < 1e-8);
}

TEST_CASE("purity deficit is second order") {
  const BipartiteSystem sys = BipartiteSystem::random(2, 3, 42);
  CHECK(purity_deficit(sys, 0.0, 1.0) < 1e-15);
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4}, deficit;
  for (double e : eps) {
    const double d = purity_deficit(sys, e, 1.0);
    CHECK(d >= 0.0);
    deficit.push_back(d);
  }
  CHECK(loglog_fit(eps, deficit).slope == doctest::Approx(2.0).epsilon(0.025));
  // deficit / eps^2 settles over the last decade.
  const double r3 = deficit[2] / 1e-6, r4 = deficit[3] / 1e-8;
  CHECK(std::abs(r3 - r4) / r4 < 0.01);

  // Probe and environment deficits agree (Schmidt symmetry), from explicit partial traces.
  const CVec psi = full_evolution(sys, 0.1, 1.0) * sys.psi0();
  const CMat rp = probe_state(psi, 2, 3), re = environment_state(psi, 2, 3);
  const double dp = 1.0 - (rp * rp).trace().real();
  const double de = 1.0 - (re * re).trace().real();
  CHECK(std::abs(dp - de) < 1e-12);
  CHECK(std::abs(dp - purity_deficit(sys, 0.1, 1.0)) < 1e-12);
}

TEST_CASE("first-order probe state") {
  const BipartiteSystem sys = BipartiteSystem::random(2, 3, 42);
  CHECK((first_order_state(sys, 0.0, 1.0) - sys.probe0()).norm() < 1e-15);
  std::vector<double> eps{1e-2, 1e-3, 1e-4}, infid;
  for (double e : eps) infid.push_back(first_order_infidelity(sys, e, 1.0));
  CHECK(loglog_fit(eps, infid).slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("commuting coupling never entangles") {
  const BipartiteSystem sys = BipartiteSystem::commuting(2, 3, 42);
  CHECK(commutator(sys.h_int(), sys.h_local()).cwiseAbs().maxCoeff() < 1e-12);
  for (double e : {1e-1, 1e-2, 1e-3}) CHECK(purity_deficit(sys, e, 1.0) < 1e-14);
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(BipartiteSystem::random(16, 17, 1), std::invalid_argument);
  CHECK_THROWS_AS(loglog_fit({0.1}, {0.2}), std::invalid_argument);
  const BipartiteSystem sys = BipartiteSystem::random(2, 2, 1);
  CHECK_THROWS_AS(BipartiteSystem(sys.h_probe(), sys.h_env(), CMat::Identity(3, 3), sys.probe0(), sys.env0()),
                  std::invalid_argument);
  CMat skew = sys.h_probe();
  skew(0, 1) += 0.1;
  CHECK_THROWS_AS(BipartiteSystem(skew, sys.h_env(), sys.h_int(), sys.probe0(), sys.env0()), std::invalid_argument);
  CHECK(BipartiteSystem::random(2, 3, 42).h_int() == BipartiteSystem::random(2, 3, 42).h_int());
}
