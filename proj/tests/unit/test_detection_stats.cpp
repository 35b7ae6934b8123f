#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qbm/detection_stats.hpp"

using namespace qbm;

namespace {

SampledDistribution normal_samples(double mean, double var, double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = lo + i * h - mean;
    d[i] = std::exp(-0.5 * u * u / var);
  }
  return SampledDistribution::normalized(lo, h, d);
}

// Closed-form Chernoff information between N(0, v1) and N(0, v2) by a fine
// scan over alpha of the Gaussian overlap integral.
double zero_mean_chernoff(double v1, double v2) {
  double best = 1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double a = i / 100000.0;
    const double val = std::pow(v1, -0.5 * a) * std::pow(v2, -0.5 * (1 - a)) / std::sqrt(a / v1 + (1 - a) / v2);
    best = std::min(best, val);
  }
  return -std::log(best);
}

Eigen::Matrix2cd random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix2cd g;
  g << std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng)),
      std::complex<double>(n(rng), n(rng)), std::complex<double>(n(rng), n(rng));
  Eigen::Matrix2cd rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("two-level channel") {
  Eigen::Matrix2cd plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(apply_channel({DecoherenceFactor(1.0)}, plus).isApprox(plus));
  const auto half = apply_channel({DecoherenceFactor(0.5)}, plus);
  CHECK(half(0, 1) == std::complex<double>(0.25, 0.0));
  CHECK(half(1, 0) == std::complex<double>(0.25, 0.0));
  CHECK(half(0, 0) == plus(0, 0));
  const auto dead = apply_channel({DecoherenceFactor(0.0)}, plus);
  CHECK(dead.isApprox(0.5 * Eigen::Matrix2cd::Identity()));

  Eigen::Matrix2cd bad;
  bad << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(apply_channel({DecoherenceFactor(1.0)}, bad), std::invalid_argument);
  bad << 0.5, 0.9, 0.9, 0.5;
  CHECK_THROWS_AS(apply_channel({DecoherenceFactor(1.0)}, bad), std::invalid_argument);
  CHECK_THROWS_AS(DecoherenceFactor(1.1), std::invalid_argument);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix2cd rho = random_density(rng);
    const std::complex<double> gamma = std::polar(u(rng), 2 * std::numbers::pi * u(rng));
    const Eigen::Matrix2cd out = apply_channel({DecoherenceFactor(gamma)}, rho);
    CHECK(out.trace() == rho.trace());
    CHECK(out == out.adjoint());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(out).eigenvalues().minCoeff() >= -1e-15);
  }
}

TEST_CASE("decoherence factor from a configuration") {
  ExperimentConfig c;
  c.L = 1.0;
  CHECK(decoherence_factor_from_config(c).gamma() == std::complex<double>(1.0, 0.0));
  c.F = std::numbers::pi;
  CHECK(std::abs(decoherence_factor_from_config(c).gamma() - std::complex<double>(-1.0, 0.0)) < 1e-15);
  c.F = 0.0;
  c.D = 1.0;
  const DecoherenceFactor g = decoherence_factor_from_config(c);
  CHECK(std::abs(g.gamma()) == doctest::Approx(std::exp(-1.0)));
  CHECK(g.s() == doctest::Approx(1.0));
  CHECK(g.theta() == 0.0);
}

TEST_CASE("interferometer probabilities") {
  CHECK(interferometer_probabilities(1.0).plus == 1.0);
  CHECK(interferometer_probabilities(1.0).minus == 0.0);
  CHECK(interferometer_probabilities(0.0).minus == 0.5);
  for (int i = 0; i <= 64; ++i) {
    const double theta = 2 * std::numbers::pi * i / 64.0;
    const auto p = interferometer_probabilities(std::polar(1.0, theta));
    CHECK(std::abs(p.minus - (1 - std::cos(theta)) / 2) <= 1e-12);
    CHECK(p.plus + p.minus == 1.0);
    const auto c = interferometer_probabilities(std::polar(0.7, -theta));
    CHECK(c.minus == interferometer_probabilities(std::polar(0.7, theta)).minus);
  }
}

TEST_CASE("Chernoff exponent") {
  const auto p = normal_samples(0.0, 1.0, -12.0, 13.0, 2001);
  const auto q = normal_samples(1.0, 1.0, -12.0, 13.0, 2001);
  CHECK(chernoff_exponent(p, q) == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(chernoff_exponent(q, p) == doctest::Approx(chernoff_exponent(p, q)).epsilon(1e-12));
  CHECK(chernoff_exponent(p, p) < 1e-12);

  const auto wide = normal_samples(0.0, 2.0, -12.0, 13.0, 2001);
  CHECK(chernoff_exponent(p, wide) == doctest::Approx(zero_mean_chernoff(1.0, 2.0)).epsilon(1e-6));

  // Disjoint supports.
  CHECK(std::isinf(chernoff_exponent(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0})));
  // Bernoulli with one certain outcome: -ln q.
  CHECK(chernoff_exponent(std::vector<double>{1.0, 0.0}, std::vector<double>{0.3, 0.7}) ==
        doctest::Approx(-std::log(0.3)));

  // Random discrete distributions: symmetric, nonnegative, zero iff equal.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(8), b(8);
    double sa = 0, sb = 0;
    for (int i = 0; i < 8; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 8; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    const double c = chernoff_exponent(a, b);
    CHECK(c > 1e-9);
    CHECK(chernoff_exponent(b, a) == doctest::Approx(c).epsilon(1e-9));
    CHECK(chernoff_exponent(a, a) < 1e-9);
  }

  CHECK_THROWS_AS(chernoff_exponent(p, normal_samples(0.0, 1.0, -11.0, 13.0, 2001)), std::invalid_argument);
  CHECK_THROWS_AS(SampledDistribution(0.0, 1.0, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(SampledDistribution(0.0, 1.0, {1.5, -0.5}), std::invalid_argument);
}

TEST_CASE("Gaussian detection exponent") {
  ExperimentConfig c;
  const GaussianState opt = GaussianState::pure(0, 0, std::sqrt(0.5), 1.0);
  CHECK(detection_error_exponent(opt, c, 0.0) == 0.0);
  // Final variances 1 and 1 + 2 D T^3 / 3 m^2 = 1.75 at D_alt = D_SQL.
  const double e = detection_error_exponent(opt, c, diffusion_sql(1, 1, 1));
  CHECK(e == doctest::Approx(zero_mean_chernoff(1.0, 1.75)).epsilon(1e-4));
  CHECK(e > 0.01);
  CHECK(e < 1.0);
  // Force hypothesis: equal variance 1, mean shift F T^2 / 2m.
  const double f = detection_error_exponent(opt, c, Hypothesis{0.0, 1.0});
  CHECK(f == doctest::Approx(0.25 / 8.0).epsilon(1e-6));
}

TEST_CASE("cat detection exponent") {
  ExperimentConfig c;
  const CatState cat = CatState::symmetric(20.0, std::sqrt(0.5), 1.0);
  CHECK(detection_error_exponent(cat, c, 0.0) == 0.0);
  const double s = diffusion_sql(1, 1, 1) / 100.0 * 400.0;
  CHECK(s == doctest::Approx(4.5));
  CHECK(detection_error_exponent(cat, c, diffusion_sql(1, 1, 1) / 100.0) ==
        doctest::Approx(-std::log((1 + std::exp(-s)) / 2)));
}

TEST_CASE("preparation search") {
  ExperimentConfig c;
  SearchOptions small;
  small.n_sigma = 21;
  small.n_r = 21;
  const auto flat = optimize_gaussian_preparation(c, 0.0, true, small);
  for (const auto& pt : flat.surface) CHECK(pt.exponent == 0.0);
  CHECK(flat.surface.size() == 21u * 21u);

  const auto plain = optimize_gaussian_preparation(c, diffusion_sql(1, 1, 1), false, small);
  CHECK(std::abs(plain.best.correlation()) <= plain.r_step);
  CHECK(plain.best.sigma_x() == doctest::Approx(std::sqrt(0.5)));
  for (const auto& pt : plain.surface) CHECK(pt.r >= 0.0);

  const auto loop = optimize_gaussian_preparation(c, diffusion_sql(1, 1, 1), true, small);
  CHECK(loop.best.correlation() < 0.0);
  CHECK(loop.best_exponent > plain.best_exponent);

  std::ostringstream csv;
  write_surface(csv, plain);
  CHECK(csv.str().rfind("sigma_x,r,exponent\n", 0) == 0);
}
