#include <doctest.h>

#include <cmath>
#include <random>

#include "qbm/sql_limits.hpp"

using namespace qbm;

TEST_CASE("force and diffusion SQL values") {
  CHECK(force_sql(1, 1, 1) == 2.0);
  CHECK(force_sql(4, 1, 1) == doctest::Approx(4.0));
  CHECK(force_sql(1, 4, 1) == doctest::Approx(0.25));
  CHECK(diffusion_sql(1, 1, 1) == 1.125);
  CHECK(diffusion_sql(1, 2, 1) == doctest::Approx(0.28125));
  CHECK(diffusion_sql(2, 1, 1) == doctest::Approx(2.25));
  CHECK_THROWS_AS(force_sql(0, 1, 1), std::invalid_argument);
}

TEST_CASE("d_min") {
  CHECK(d_min(1, 1, 1) == 1.0);
  CHECK(d_min(1, 2, 1) == doctest::Approx(0.25));
  // At L = sigma_meas = 1 (m = T = hbar = 1) D_min = 8/9 D_SQL exactly.
  const double meas = optimal_widths(1, 1, 1).sigma_x_meas;
  CHECK(d_min(1, meas, 1) == 8.0 / 9.0 * diffusion_sql(1, 1, 1));
  // General units: D_min(L = sqrt(hbar T / m)) = hbar m / T^2.
  CHECK(d_min(2.0, optimal_widths(3.0, 2.0, 0.5).sigma_x_meas, 0.5) == doctest::Approx(0.5 * 3.0 / 4.0));
}

TEST_CASE("optimal widths minimize the measured spread") {
  const auto w = optimal_widths(1, 1, 1);
  CHECK(w.sigma_x_prep == doctest::Approx(std::sqrt(0.5)));
  CHECK(w.sigma_x_meas == 1.0);
  CHECK(w.sigma_x_disp == doctest::Approx(w.sigma_x_prep));
  CHECK(w.sigma_p_prep == doctest::Approx(1.0 / (2.0 * w.sigma_x_prep)));
  CHECK(measured_spread(w.sigma_x_prep, 1, 1, 1) == doctest::Approx(w.sigma_x_meas));
  CHECK(measured_spread(1.1 * w.sigma_x_prep, 1, 1, 1) > w.sigma_x_meas);
  CHECK(measured_spread(0.9 * w.sigma_x_prep, 1, 1, 1) > w.sigma_x_meas);
  // Brute-force argmin on a fine log grid.
  const auto v = optimal_widths(2.5, 0.7, 0.3);
  double best = 0.0, best_spread = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double s = v.sigma_x_prep * std::exp(-1.0 + 2.0 * i / 200000.0);
    const double spread = measured_spread(s, 2.5, 0.7, 0.3);
    if (spread < best_spread) {
      best_spread = spread;
      best = s;
    }
  }
  CHECK(best == doctest::Approx(v.sigma_x_prep).epsilon(1e-4));
}

TEST_CASE("diffusion spreads and threshold identity") {
  const auto s = diffusion_spreads(1, 1, 1);
  CHECK(s.sigma_p == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.sigma_x == doctest::Approx(std::sqrt(8.0) / 3.0));
  const auto zero = diffusion_spreads(0, 1, 1);
  CHECK(zero.sigma_p == 0.0);
  CHECK(zero.sigma_x == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double m = u(rng), T = u(rng), hbar = u(rng);
    const double sx = diffusion_spreads(diffusion_sql(m, T, hbar), T, m).sigma_x;
    CHECK(std::abs(sx - optimal_widths(m, T, hbar).sigma_x_meas) <= 1e-12 * sx);
  }
}

TEST_CASE("dimensional scaling of the SQLs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int i = 0; i < 500; ++i) {
    const double m = u(rng), T = u(rng), h = u(rng);
    const double km = u(rng), kt = u(rng), kh = u(rng);
    const double f = force_sql(km * m, kt * T, kh * h);
    CHECK(f == doctest::Approx(std::sqrt(kh * km / (kt * kt * kt)) * force_sql(m, T, h)).epsilon(1e-12));
    const double d = diffusion_sql(km * m, kt * T, kh * h);
    CHECK(d == doctest::Approx(kh * km / (kt * kt) * diffusion_sql(m, T, h)).epsilon(1e-12));
  }
}

TEST_CASE("hbar scaling keeps gamma fixed") {
  ExperimentConfig c;
  c.L = 1.0;
  c.F = 0.7;
  c.D = 0.3;
  const auto same = hbar_scaling(c, 1.0);
  CHECK(same.scaled.hbar == c.hbar);
  CHECK(same.scaled.F == c.F);
  CHECK(same.scaled.D == c.D);

  const auto small = hbar_scaling(c, 0.01);
  CHECK(std::abs(small.gamma_after - small.gamma_before) <= 1e-12 * std::abs(small.gamma_before));
  CHECK(small.scaled.F == doctest::Approx(0.01 * c.F));
  CHECK(small.scaled.D == doctest::Approx(1e-4 * c.D));

  // F / F_SQL shrinks as sqrt(kappa).
  const double base = c.F / force_sql(c.m, c.T, c.hbar);
  for (double kappa : {1.0, 0.1, 0.01}) {
    const auto s = hbar_scaling(c, kappa).scaled;
    CHECK(s.F / force_sql(s.m, s.T, s.hbar) == doctest::Approx(base * std::sqrt(kappa)).epsilon(1e-12));
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 300; ++i) {
    ExperimentConfig r;
    r.m = u(rng);
    r.T = u(rng);
    r.hbar = u(rng);
    r.L = u(rng);
    r.F = u(rng) - 1.5;
    r.D = 0.1 * u(rng);
    const auto s = hbar_scaling(r, std::exp(-4.0 * u(rng)));
    CHECK(std::abs(s.gamma_after - s.gamma_before) <= 1e-12 * std::abs(s.gamma_before));
  }

  ExperimentConfig no_l;
  CHECK_THROWS_WITH_AS(hbar_scaling(no_l, 0.1), doctest::Contains("L"), std::invalid_argument);
}

TEST_CASE("config validation names the field") {
  ExperimentConfig c;
  c.m = -1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("m:"), std::invalid_argument);
  c.m = 1;
  c.D = -0.1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("D:"), std::invalid_argument);
  c.D = 0;
  c.L = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("L:"), std::invalid_argument);
}
