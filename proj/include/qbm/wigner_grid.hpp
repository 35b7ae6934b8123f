#pragma once

// Rasterized Wigner functions on a rectangular phase-space window, the
// discrete density-matrix <-> Wigner transform pair, a split-step
// Klein-Kramers integrator, and marginal / fringe-visibility extraction.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbm/gaussian_dynamics.hpp"

namespace qbm {

struct Window {
  double xmin;
  double xmax;
  double pmin;
  double pmax;
};

/// Cell-centered samples W(x_i, p_j), x_i = xmin + (i + 1/2) dx. Storage is
/// row-major by momentum: values[j * nx + i].
class WignerGrid {
 public:
  WignerGrid(std::size_t nx, std::size_t np, const Window& window);
  WignerGrid(std::size_t nx, std::size_t np, const Window& window, std::vector<double> values);

  std::size_t nx() const { return nx_; }
  std::size_t np() const { return np_; }
  const Window& window() const { return window_; }
  double dx() const { return (window_.xmax - window_.xmin) / static_cast<double>(nx_); }
  double dp() const { return (window_.pmax - window_.pmin) / static_cast<double>(np_); }
  double x(std::size_t i) const { return window_.xmin + (static_cast<double>(i) + 0.5) * dx(); }
  double p(std::size_t j) const { return window_.pmin + (static_cast<double>(j) + 0.5) * dp(); }

  double& at(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
  double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Midpoint-rule integral.
  double mass() const;

 private:
  std::size_t nx_;
  std::size_t np_;
  Window window_;
  std::vector<double> values_;
};

class WindowTooSmall : public std::runtime_error {
 public:
  WindowTooSmall(const std::string& what, const Window& suggested)
      : std::runtime_error(what), suggested_(suggested) {}
  const Window& suggested() const { return suggested_; }

 private:
  Window suggested_;
};

/// Smallest window holding +-n_sigma standard deviations of every term.
Window covering_window(const WignerExpansion& w, double n_sigma);

/// Window for evolving `initial` over [0, T]: x spans every branch at the
/// start and after free flight plus a 6 sigma margin; p spans 6 sigma_p
/// plus 3 sqrt(2 D T) of diffusive growth.
Window auto_window(const WignerExpansion& initial, double diffusion, double mass, double duration);

/// Samples the analytic Wigner function at cell centers. Throws
/// WindowTooSmall (carrying suggested bounds) unless the window covers
/// 5 sigma of every term.
WignerGrid rasterize(const WignerExpansion& w, const Window& window, std::size_t nx, std::size_t np);
WignerGrid rasterize(const GaussianState& state, const Window& window, std::size_t nx, std::size_t np);
WignerGrid rasterize(const CatState& cat, const Window& window, std::size_t nx, std::size_t np);

/// rho(x_a, x_b) on a uniform position grid x_a = x0 + a dx.
class PositionDensityMatrix {
 public:
  /// Throws unless rho is square, Hermitian (1e-10) and has unit trace
  /// sum_a rho_aa dx within 1e-6.
  PositionDensityMatrix(double x0, double dx, Eigen::MatrixXcd rho);

  /// |psi><psi| from samples of a wavefunction (normalized internally).
  static PositionDensityMatrix from_wavefunction(double x0, double dx, const Eigen::VectorXcd& psi);

  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  double x0() const { return x0_; }
  double dx() const { return dx_; }
  double x(std::size_t a) const { return x0_ + static_cast<double>(a) * dx_; }
  const Eigen::MatrixXcd& rho() const { return rho_; }
  std::complex<double> operator()(std::size_t a, std::size_t b) const { return rho_(a, b); }

 private:
  double x0_;
  double dx_;
  Eigen::MatrixXcd rho_;
};

/// Discrete Wigner transform
///   W(x, p) = (1 / 2 pi hbar) sum_y dy e^{-i p y / hbar} rho(x + y/2, x - y/2).
/// For an n-point position grid (n even) the result has 2n - 1 x-cells at
/// spacing dx/2 (every midpoint (x_a + x_b)/2) and n p-cells at spacing
/// pi hbar / (n dx), the discrete-Fourier dual of the y-step 2 dx.
WignerGrid wigner_from_density(const PositionDensityMatrix& dm, double hbar);

/// Exact inverse of wigner_from_density. Throws std::invalid_argument on
/// grid shapes or spacings that are not of that form.
PositionDensityMatrix density_from_wigner(const WignerGrid& grid, double hbar);

struct EvolveOptions {
  /// Strang steps (diffusion/2, shear, diffusion/2).
  int steps = 64;
  /// Diffusion substeps satisfy D dt <= cfl * dp^2.
  double cfl = 0.4;
  /// Allowed relative mass drift before aborting.
  double mass_tolerance = 1e-6;
};

class GridInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates dW/dt = -(p/m) dW/dx + D d^2W/dp^2 by Strang splitting:
/// exact per-row shear with a conservative piecewise-linear remap, and
/// explicit centered-difference diffusion substeps. Values outside the
/// window are zero. Throws GridInstability on mass drift or blow-up.
WignerGrid evolve_grid(const WignerGrid& grid, double diffusion, double mass, double t,
                       const EvolveOptions& options = {});
WignerGrid evolve_grid(const WignerGrid& grid, double diffusion, double mass, double t, int steps);

/// Rigid phase-space translation by (shift_x, shift_p) with the same
/// conservative remap. Used to add a uniform force after evolve_grid.
WignerGrid translate_grid(const WignerGrid& grid, double shift_x, double shift_p);

struct Marginal {
  std::vector<double> coordinate;
  std::vector<double> density;
  double spacing = 0.0;
  /// Samples below -1e-9 * peak before clipping to zero.
  std::size_t clipped = 0;
  double most_negative = 0.0;

  double total() const;
  double mean() const;
  double variance() const;
};

Marginal position_marginal(const WignerGrid& grid);
Marginal momentum_marginal(const WignerGrid& grid);

class FringeNotResolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex fringe amplitude of a momentum marginal at period 2 pi hbar / L:
///   2 sum_j P(p_j) e^{i p_j L / hbar} dp / sum_j P(p_j) dp.
/// Its modulus is the fringe contrast of an ideal cat (|gamma| for equal
/// branches). Throws FringeNotResolved below 8 samples per fringe.
std::complex<double> fringe_phasor(const Marginal& momentum, double separation, double hbar);
double fringe_visibility(const Marginal& momentum, double separation, double hbar);

/// (max - min) / (max + min) of P(p) / envelope over the central fringe
/// period. Underestimates decoherence when the diffusion kernel is not
/// small against the momentum envelope; reported for diagnostics only.
double fringe_contrast_extrema(const Marginal& momentum, const std::vector<double>& envelope, double separation,
                               double hbar);

/// "wigner-grid v1" text format.
void write_grid(std::ostream& out, const WignerGrid& grid);
WignerGrid read_grid(std::istream& in);
void write_grid_file(const std::string& path, const WignerGrid& grid);

/// Two-column CSV `coordinate,probability_density` with a `#` header line.
void write_marginal(std::ostream& out, const Marginal& marginal);
void write_marginal_file(const std::string& path, const Marginal& marginal);

/// Shortest round-trippable decimal representation.
std::string format_double(double value);

}  // namespace qbm
