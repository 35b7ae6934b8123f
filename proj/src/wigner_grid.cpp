#include "qbm/wigner_grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace qbm {

// ---------------------------------------------------------------------------
// WignerGrid

WignerGrid::WignerGrid(std::size_t nx, std::size_t np, const Window& window)
    : WignerGrid(nx, np, window, std::vector<double>(nx * np, 0.0)) {}

WignerGrid::WignerGrid(std::size_t nx, std::size_t np, const Window& window, std::vector<double> values)
    : nx_(nx), np_(np), window_(window), values_(std::move(values)) {
  if (nx == 0 || np == 0) throw std::invalid_argument("WignerGrid: resolution must be positive");
  if (!(window.xmin < window.xmax) || !(window.pmin < window.pmax)) {
    throw std::invalid_argument("WignerGrid: window bounds must be strictly ordered");
  }
  if (values_.size() != nx * np) throw std::invalid_argument("WignerGrid: value count does not match nx*np");
}

double WignerGrid::mass() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * dx() * dp();
}

// ---------------------------------------------------------------------------
// Windows and rasterization

Window covering_window(const WignerExpansion& w, double n_sigma) {
  Window out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& term : w.terms()) {
    const double sx = n_sigma * std::sqrt(term.cov(0, 0));
    const double sp = n_sigma * std::sqrt(term.cov(1, 1));
    out.xmin = std::min(out.xmin, term.mean(0) - sx);
    out.xmax = std::max(out.xmax, term.mean(0) + sx);
    out.pmin = std::min(out.pmin, term.mean(1) - sp);
    out.pmax = std::max(out.pmax, term.mean(1) + sp);
  }
  return out;
}

Window auto_window(const WignerExpansion& initial, double diffusion, double mass, double duration) {
  const Window start = covering_window(initial, 6.0);
  const Window end = covering_window(initial.evolved(diffusion, mass, duration), 6.0);
  const double growth = 3.0 * std::sqrt(2.0 * diffusion * duration);
  return Window{std::min(start.xmin, end.xmin), std::max(start.xmax, end.xmax), start.pmin - growth,
                start.pmax + growth};
}

namespace {

bool contains(const Window& outer, const Window& inner) {
  return outer.xmin <= inner.xmin && outer.xmax >= inner.xmax && outer.pmin <= inner.pmin &&
         outer.pmax >= inner.pmax;
}

std::string describe(const Window& w) {
  std::ostringstream s;
  s << "x in [" << w.xmin << ", " << w.xmax << "], p in [" << w.pmin << ", " << w.pmax << "]";
  return s.str();
}

}  // namespace

WignerGrid rasterize(const WignerExpansion& w, const Window& window, std::size_t nx, std::size_t np) {
  const Window needed = covering_window(w, 5.0);
  if (!contains(window, needed)) {
    const Window suggested = covering_window(w, 6.0);
    throw WindowTooSmall("rasterize: window does not cover 5 sigma of every branch; suggested " +
                             describe(suggested),
                         suggested);
  }
  WignerGrid grid(nx, np, window);
  for (std::size_t j = 0; j < np; ++j) {
    const double p = grid.p(j);
    for (std::size_t i = 0; i < nx; ++i) grid.at(i, j) = w.value(grid.x(i), p);
  }
  return grid;
}

WignerGrid rasterize(const GaussianState& state, const Window& window, std::size_t nx, std::size_t np) {
  return rasterize(wigner_expansion(state), window, nx, np);
}

WignerGrid rasterize(const CatState& cat, const Window& window, std::size_t nx, std::size_t np) {
  return rasterize(cat.wigner(), window, nx, np);
}

// ---------------------------------------------------------------------------
// Density matrix <-> Wigner

PositionDensityMatrix::PositionDensityMatrix(double x0, double dx, Eigen::MatrixXcd rho)
    : x0_(x0), dx_(dx), rho_(std::move(rho)) {
  if (!(dx > 0.0)) throw std::invalid_argument("PositionDensityMatrix: dx must be positive");
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw std::invalid_argument("PositionDensityMatrix: rho must be square and non-empty");
  }
  const double scale = std::max(1.0, rho_.cwiseAbs().maxCoeff());
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("PositionDensityMatrix: rho is not Hermitian");
  }
  const double trace = rho_.trace().real() * dx_;
  if (std::abs(trace - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "PositionDensityMatrix: trace " << trace << " differs from 1";
    throw std::invalid_argument(msg.str());
  }
}

PositionDensityMatrix PositionDensityMatrix::from_wavefunction(double x0, double dx, const Eigen::VectorXcd& psi) {
  const double norm = std::sqrt(psi.squaredNorm() * dx);
  const Eigen::VectorXcd v = psi / norm;
  return PositionDensityMatrix(x0, dx, v * v.adjoint());
}

namespace {

// Row s of the Wigner grid pairs rho(a, b) with a + b = s; the difference
// d = a - b = 2j + (s mod 2) is stored at FFT slot j mod n with sign (-1)^j.
struct RowPair {
  long a;
  long b;
  std::size_t slot;
  double sign;
};

std::vector<RowPair> row_pairs(long s, long n) {
  std::vector<RowPair> out;
  const long r = s % 2;
  for (long j = -n / 2; j < n / 2; ++j) {
    const long d = 2 * j + r;
    const long a = (s + d) / 2;
    const long b = (s - d) / 2;
    if (a < 0 || b < 0 || a >= n || b >= n) continue;
    out.push_back({a, b, static_cast<std::size_t>((j % n + n) % n), (j % 2 == 0) ? 1.0 : -1.0});
  }
  return out;
}

}  // namespace

WignerGrid wigner_from_density(const PositionDensityMatrix& dm, double hbar) {
  const long n = static_cast<long>(dm.size());
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("wigner_from_density: grid size must be even and >= 2");
  const double dx = dm.dx();
  const double dp = std::numbers::pi * hbar / (static_cast<double>(n) * dx);
  const std::size_t nx = static_cast<std::size_t>(2 * n - 1);
  const std::size_t np = static_cast<std::size_t>(n);
  const double xmin = dm.x0() - 0.25 * dx;
  const double pmin = -0.5 * static_cast<double>(n + 1) * dp;
  WignerGrid grid(nx, np, Window{xmin, xmin + 0.5 * dx * static_cast<double>(nx), pmin, pmin + dp * static_cast<double>(n)});

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> out;
  const double prefactor = dx / (std::numbers::pi * hbar);
  for (long s = 0; s < 2 * n - 1; ++s) {
    std::fill(in.begin(), in.end(), std::complex<double>(0.0));
    for (const auto& pair : row_pairs(s, n)) in[pair.slot] = pair.sign * dm(pair.a, pair.b);
    fft.fwd(out, in);
    const double r = static_cast<double>(s % 2);
    for (long l = 0; l < n; ++l) {
      const double phase = -std::numbers::pi * static_cast<double>(l - n / 2) * r / static_cast<double>(n);
      grid.at(static_cast<std::size_t>(s), static_cast<std::size_t>(l)) =
          prefactor * (std::polar(1.0, phase) * out[static_cast<std::size_t>(l)]).real();
    }
  }
  return grid;
}

PositionDensityMatrix density_from_wigner(const WignerGrid& grid, double hbar) {
  const long n = static_cast<long>(grid.np());
  if (n < 2 || n % 2 != 0 || grid.nx() != static_cast<std::size_t>(2 * n - 1)) {
    throw std::invalid_argument("density_from_wigner: grid must be (2n-1) x n with n even");
  }
  const double dx = 2.0 * grid.dx();
  const double dp_expected = std::numbers::pi * hbar / (static_cast<double>(n) * dx);
  if (std::abs(grid.dp() - dp_expected) > 1e-9 * dp_expected ||
      std::abs(grid.window().pmin + 0.5 * static_cast<double>(n + 1) * dp_expected) > 1e-9 * dp_expected * n) {
    throw std::invalid_argument("density_from_wigner: momentum grid is not the Fourier dual of the position grid");
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> out;
  const double prefactor = std::numbers::pi * hbar / dx;
  for (long s = 0; s < 2 * n - 1; ++s) {
    const double r = static_cast<double>(s % 2);
    for (long l = 0; l < n; ++l) {
      const double phase = std::numbers::pi * static_cast<double>(l - n / 2) * r / static_cast<double>(n);
      in[static_cast<std::size_t>(l)] = std::polar(grid.at(static_cast<std::size_t>(s), static_cast<std::size_t>(l)), phase);
    }
    fft.inv(out, in);
    for (const auto& pair : row_pairs(s, n)) rho(pair.a, pair.b) = prefactor * pair.sign * out[pair.slot];
  }
  const double x0 = grid.window().xmin + 0.25 * dx;
  return PositionDensityMatrix(x0, dx, std::move(rho));
}

// ---------------------------------------------------------------------------
// Klein-Kramers integrator

namespace {

// Conservative piecewise-linear (centered slope) remap of a row of cell
// averages translated by `cells` cells. Exact for the first two moments.
void remap_row(const double* src, double* dst, std::size_t n, double cells) {
  const double whole = std::floor(cells);
  const double f = cells - whole;
  const long shift = static_cast<long>(whole);
  const double q = 0.25 * f * (1.0 - f);
  const double c_up = -q;             // u_{i+1}
  const double c_0 = 1.0 - f + q;     // u_i
  const double c_down = f + q;        // u_{i-1}
  const double c_down2 = -q;          // u_{i-2}
  const long len = static_cast<long>(n);
  auto u = [&](long k) { return (k >= 0 && k < len) ? src[k] : 0.0; };
  for (long i = 0; i < len; ++i) {
    const long base = i - shift;
    dst[i] = c_up * u(base + 1) + c_0 * u(base) + c_down * u(base - 1) + c_down2 * u(base - 2);
  }
}

void shear(WignerGrid& grid, std::vector<double>& scratch, double mass, double h) {
  const std::size_t nx = grid.nx();
  scratch.resize(nx);
  const double dx = grid.dx();
  for (std::size_t j = 0; j < grid.np(); ++j) {
    const double cells = grid.p(j) * h / (mass * dx);
    double* row = grid.values().data() + j * nx;
    remap_row(row, scratch.data(), nx, cells);
    std::copy(scratch.begin(), scratch.end(), row);
  }
}

void diffuse(WignerGrid& grid, std::vector<double>& scratch, double diffusion, double duration, double cfl) {
  if (diffusion == 0.0 || duration == 0.0) return;
  const double dp = grid.dp();
  const double dt_max = cfl * dp * dp / diffusion;
  const auto substeps = static_cast<long>(std::ceil(duration / dt_max - 1e-12));
  const double ratio = diffusion * (duration / static_cast<double>(substeps)) / (dp * dp);
  const std::size_t nx = grid.nx();
  const std::size_t np = grid.np();
  scratch.resize(nx * np);
  for (long step = 0; step < substeps; ++step) {
    const std::vector<double>& w = grid.values();
    for (std::size_t j = 0; j < np; ++j) {
      const double* mid = w.data() + j * nx;
      const double* below = j > 0 ? mid - nx : nullptr;
      const double* above = j + 1 < np ? mid + nx : nullptr;
      double* out = scratch.data() + j * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        const double lo = below ? below[i] : 0.0;
        const double hi = above ? above[i] : 0.0;
        out[i] = mid[i] + ratio * (hi - 2.0 * mid[i] + lo);
      }
    }
    grid.values().swap(scratch);
  }
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

WignerGrid evolve_grid(const WignerGrid& grid, double diffusion, double mass, double t, const EvolveOptions& options) {
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw std::invalid_argument("evolve_grid: D must be >= 0");
  if (!(mass > 0.0)) throw std::invalid_argument("evolve_grid: mass must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_grid: t must be >= 0");
  if (options.steps < 1) throw std::invalid_argument("evolve_grid: steps must be >= 1");
  if (!(options.cfl > 0.0 && options.cfl <= 0.5)) throw std::invalid_argument("evolve_grid: cfl must be in (0, 0.5]");

  const double mass0 = grid.mass();
  const double peak0 = max_abs(grid.values());
  WignerGrid out = grid;
  if (t == 0.0) return out;

  std::vector<double> row_scratch;
  std::vector<double> field_scratch;
  const double h = t / static_cast<double>(options.steps);
  diffuse(out, field_scratch, diffusion, 0.5 * h, options.cfl);
  for (int step = 0; step < options.steps; ++step) {
    shear(out, row_scratch, mass, h);
    diffuse(out, field_scratch, diffusion, step + 1 < options.steps ? h : 0.5 * h, options.cfl);
  }

  const double peak = max_abs(out.values());
  if (!std::isfinite(peak) || peak > 10.0 * peak0) {
    std::ostringstream msg;
    msg << "evolve_grid: blow-up detected (max |W| " << peak0 << " -> " << peak << ")";
    throw GridInstability(msg.str());
  }
  const double drift = std::abs(out.mass() - mass0) / std::max(std::abs(mass0), 1e-300);
  if (drift > options.mass_tolerance) {
    std::ostringstream msg;
    msg << "evolve_grid: relative mass drift " << drift << " exceeds " << options.mass_tolerance
        << " (mass " << mass0 << " -> " << out.mass() << "); enlarge the window";
    throw GridInstability(msg.str());
  }
  return out;
}

WignerGrid evolve_grid(const WignerGrid& grid, double diffusion, double mass, double t, int steps) {
  EvolveOptions options;
  options.steps = steps;
  return evolve_grid(grid, diffusion, mass, t, options);
}

WignerGrid translate_grid(const WignerGrid& grid, double shift_x, double shift_p) {
  WignerGrid out = grid;
  const std::size_t nx = grid.nx();
  const std::size_t np = grid.np();
  std::vector<double> scratch(std::max(nx, np));
  if (shift_x != 0.0) {
    for (std::size_t j = 0; j < np; ++j) {
      double* row = out.values().data() + j * nx;
      remap_row(row, scratch.data(), nx, shift_x / grid.dx());
      std::copy(scratch.begin(), scratch.begin() + static_cast<long>(nx), row);
    }
  }
  if (shift_p != 0.0) {
    std::vector<double> column(np);
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < np; ++j) column[j] = out.at(i, j);
      remap_row(column.data(), scratch.data(), np, shift_p / grid.dp());
      for (std::size_t j = 0; j < np; ++j) out.at(i, j) = scratch[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Marginals and fringes

double Marginal::total() const {
  double sum = 0.0;
  for (double d : density) sum += d;
  return sum * spacing;
}

double Marginal::mean() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) sum += coordinate[i] * density[i];
  return sum * spacing / total();
}

double Marginal::variance() const {
  const double mu = mean();
  double sum = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double u = coordinate[i] - mu;
    sum += u * u * density[i];
  }
  return sum * spacing / total();
}

namespace {

void clip(Marginal& m) {
  double peak = 0.0;
  for (double d : m.density) peak = std::max(peak, d);
  for (double& d : m.density) {
    if (d < 0.0) {
      if (d < -1e-9 * peak) ++m.clipped;
      m.most_negative = std::min(m.most_negative, d);
      d = 0.0;
    }
  }
}

}  // namespace

Marginal position_marginal(const WignerGrid& grid) {
  Marginal m;
  m.spacing = grid.dx();
  m.coordinate.resize(grid.nx());
  m.density.assign(grid.nx(), 0.0);
  for (std::size_t i = 0; i < grid.nx(); ++i) m.coordinate[i] = grid.x(i);
  for (std::size_t j = 0; j < grid.np(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) m.density[i] += grid.at(i, j);
  }
  for (double& d : m.density) d *= grid.dp();
  clip(m);
  return m;
}

Marginal momentum_marginal(const WignerGrid& grid) {
  Marginal m;
  m.spacing = grid.dp();
  m.coordinate.resize(grid.np());
  m.density.assign(grid.np(), 0.0);
  for (std::size_t j = 0; j < grid.np(); ++j) {
    m.coordinate[j] = grid.p(j);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.nx(); ++i) sum += grid.at(i, j);
    m.density[j] = sum * grid.dx();
  }
  clip(m);
  return m;
}

std::complex<double> fringe_phasor(const Marginal& momentum, double separation, double hbar) {
  if (!(separation > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("fringe_phasor: L and hbar must be positive");
  const double period = 2.0 * std::numbers::pi * hbar / separation;
  if (momentum.spacing * 8.0 > period) {
    std::ostringstream msg;
    msg << "fringe period " << period << " is resolved by only " << period / momentum.spacing
        << " samples (need 8)";
    throw FringeNotResolved(msg.str());
  }
  const double k = separation / hbar;
  std::complex<double> acc = 0.0;
  double norm = 0.0;
  for (std::size_t j = 0; j < momentum.density.size(); ++j) {
    acc += momentum.density[j] * std::polar(1.0, k * momentum.coordinate[j]);
    norm += momentum.density[j];
  }
  return 2.0 * acc / norm;
}

double fringe_visibility(const Marginal& momentum, double separation, double hbar) {
  return std::min(1.0, std::abs(fringe_phasor(momentum, separation, hbar)));
}

double fringe_contrast_extrema(const Marginal& momentum, const std::vector<double>& envelope, double separation,
                               double hbar) {
  if (envelope.size() != momentum.density.size()) {
    throw std::invalid_argument("fringe_contrast_extrema: envelope size mismatch");
  }
  const double period = 2.0 * std::numbers::pi * hbar / separation;
  if (momentum.spacing * 8.0 > period) throw FringeNotResolved("fringe_contrast_extrema: period not resolved");
  const auto peak = std::max_element(envelope.begin(), envelope.end()) - envelope.begin();
  const double centre = momentum.coordinate[static_cast<std::size_t>(peak)];
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < envelope.size(); ++j) {
    if (std::abs(momentum.coordinate[j] - centre) > 0.5 * period || envelope[j] <= 0.0) continue;
    const double ratio = momentum.density[j] / envelope[j];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return (hi - lo) / (hi + lo);
}

// ---------------------------------------------------------------------------
// Files

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_grid(std::ostream& out, const WignerGrid& grid) {
  const Window& w = grid.window();
  out << "# wigner-grid v1\n";
  out << grid.nx() << ',' << grid.np() << ',' << format_double(w.xmin) << ',' << format_double(w.xmax) << ','
      << format_double(w.pmin) << ',' << format_double(w.pmax) << '\n';
  std::string line;
  for (std::size_t j = 0; j < grid.np(); ++j) {
    line.clear();
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      if (i) line += ',';
      line += format_double(grid.at(i, j));
    }
    line += '\n';
    out << line;
  }
}

namespace {

double parse_double(std::string_view text, const char* what) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("read_grid: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

WignerGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# wigner-grid v1") {
    throw std::invalid_argument("read_grid: missing '# wigner-grid v1' header");
  }
  if (!std::getline(in, line)) throw std::invalid_argument("read_grid: missing dimensions line");
  const auto head = split(line);
  if (head.size() != 6) throw std::invalid_argument("read_grid: dimensions line needs 6 fields");
  const auto nx = static_cast<std::size_t>(parse_double(head[0], "nx"));
  const auto np = static_cast<std::size_t>(parse_double(head[1], "np"));
  const Window w{parse_double(head[2], "xmin"), parse_double(head[3], "xmax"), parse_double(head[4], "pmin"),
                 parse_double(head[5], "pmax")};
  std::vector<double> values;
  values.reserve(nx * np);
  for (std::size_t j = 0; j < np; ++j) {
    if (!std::getline(in, line)) throw std::invalid_argument("read_grid: truncated value block");
    const auto fields = split(line);
    if (fields.size() != nx) throw std::invalid_argument("read_grid: row has wrong number of values");
    for (const auto& f : fields) values.push_back(parse_double(f, "value"));
  }
  return WignerGrid(nx, np, w, std::move(values));
}

void write_grid_file(const std::string& path, const WignerGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_grid(out, grid);
}

void write_marginal(std::ostream& out, const Marginal& marginal) {
  out << "# coordinate,probability_density\n";
  for (std::size_t i = 0; i < marginal.density.size(); ++i) {
    out << format_double(marginal.coordinate[i]) << ',' << format_double(marginal.density[i]) << '\n';
  }
}

void write_marginal_file(const std::string& path, const Marginal& marginal) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_marginal(out, marginal);
}

}  // namespace qbm
