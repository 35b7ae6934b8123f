#include "qbm/perturbation_order.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qbm/wigner_grid.hpp"

namespace qbm {

namespace {

const std::complex<double> I(0.0, 1.0);

void require_square(const CMat& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument(std::string(name) + ": must be square");
}

void require_hermitian(const CMat& m, const char* name) {
  require_square(m, name);
  if (!m.allFinite()) throw std::invalid_argument(std::string(name) + ": non-finite entry");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + ": not Hermitian");
  }
}

void require_unit(const CVec& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw std::invalid_argument(std::string(name) + ": not normalized");
}

double operator_norm(const CMat& m) {
  return Eigen::JacobiSVD<CMat>(m).singularValues()(0);
}

CMat random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMat g(n, n);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = {normal(rng), normal(rng)};
  }
  return 0.5 * (g + g.adjoint());
}

CVec random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVec v(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {normal(rng), normal(rng)};
  return v / v.norm();
}

CMat evolution(const CMat& h, double t) { return expm(CMat(-I * t * h)); }

Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_matrix(
    const CVec& psi, std::size_t d_probe, std::size_t d_env) {
  if (static_cast<std::size_t>(psi.size()) != d_probe * d_env) throw std::invalid_argument("state dimension mismatch");
  return {psi.data(), static_cast<Eigen::Index>(d_probe), static_cast<Eigen::Index>(d_env)};
}

}  // namespace

CMat commutator(const CMat& a, const CMat& b) {
  require_square(a, "A");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("commutator: dimension mismatch");
  return a * b - b * a;
}

CMat expm(const CMat& a) {
  require_square(a, "expm");
  return a.exp();
}

ZassenhausTerms zassenhaus_terms(const CMat& a, const CMat& b) {
  const CMat ab = commutator(a, b);
  return {-0.5 * ab, commutator(b, ab) / 3.0 + commutator(a, ab) / 6.0};
}

double zassenhaus_residual(const CMat& a, const CMat& b, double h) {
  const CMat ha = h * a;
  const CMat hb = h * b;
  const auto c = zassenhaus_terms(ha, hb);
  const CMat exact = expm(CMat(ha + hb));
  return operator_norm(exact - expm(ha) * expm(hb) * expm(c.c2) * expm(c.c3));
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

BipartiteSystem::BipartiteSystem(CMat h_probe, CMat h_env, CMat h_int, CVec probe0, CVec env0)
    : h_probe_(std::move(h_probe)),
      h_env_(std::move(h_env)),
      h_int_(std::move(h_int)),
      probe0_(std::move(probe0)),
      env0_(std::move(env0)) {
  require_hermitian(h_probe_, "H_P");
  require_hermitian(h_env_, "H_E");
  require_hermitian(h_int_, "H_I");
  const std::size_t dim = d_probe() * d_env();
  if (dim > kMaxProductDimension) {
    std::ostringstream msg;
    msg << "dims: product dimension " << dim << " exceeds " << kMaxProductDimension;
    throw std::invalid_argument(msg.str());
  }
  if (static_cast<std::size_t>(h_int_.rows()) != dim) throw std::invalid_argument("H_I: must act on the product space");
  if (static_cast<std::size_t>(probe0_.size()) != d_probe()) throw std::invalid_argument("N0: dimension mismatch");
  if (static_cast<std::size_t>(env0_.size()) != d_env()) throw std::invalid_argument("E0: dimension mismatch");
  require_unit(probe0_, "N0");
  require_unit(env0_, "E0");
}

namespace {

void require_dims(std::size_t d_probe, std::size_t d_env) {
  if (d_probe == 0 || d_env == 0) throw std::invalid_argument("dims: dimensions must be positive");
  if (d_probe > kMaxProductDimension || d_env > kMaxProductDimension / d_probe) {
    std::ostringstream msg;
    msg << "dims: product dimension " << d_probe << "x" << d_env << " exceeds " << kMaxProductDimension;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

BipartiteSystem BipartiteSystem::random(std::size_t d_probe, std::size_t d_env, std::uint64_t seed) {
  require_dims(d_probe, d_env);
  std::mt19937_64 rng(seed);
  CMat hp = random_hermitian(d_probe, rng);
  CMat he = random_hermitian(d_env, rng);
  CMat hi = random_hermitian(d_probe * d_env, rng);
  CVec n0 = random_unit(d_probe, rng);
  CVec e0 = random_unit(d_env, rng);
  return BipartiteSystem(std::move(hp), std::move(he), std::move(hi), std::move(n0), std::move(e0));
}

BipartiteSystem BipartiteSystem::commuting(std::size_t d_probe, std::size_t d_env, std::uint64_t seed) {
  require_dims(d_probe, d_env);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CMat hp = random_hermitian(d_probe, rng);
  CMat he = CMat::Zero(d_env, d_env);
  CMat hb = CMat::Zero(d_env, d_env);
  for (std::size_t k = 0; k < d_env; ++k) {
    he(k, k) = normal(rng);
    hb(k, k) = normal(rng);
  }
  const CMat f = hp * hp + 0.5 * hp;
  const CMat product = kron(f, hb);
  CMat hi = 0.5 * (product + product.adjoint());
  CVec n0 = random_unit(d_probe, rng);
  CVec e0 = CVec::Zero(d_env);
  e0(0) = 1.0;
  return BipartiteSystem(std::move(hp), std::move(he), std::move(hi), std::move(n0), std::move(e0));
}

CVec BipartiteSystem::psi0() const {
  CVec out(probe0_.size() * env0_.size());
  for (Eigen::Index i = 0; i < probe0_.size(); ++i) out.segment(i * env0_.size(), env0_.size()) = probe0_(i) * env0_;
  return out;
}

CMat BipartiteSystem::h_local() const {
  const auto dp = static_cast<Eigen::Index>(d_probe());
  const auto de = static_cast<Eigen::Index>(d_env());
  return kron(h_probe_, CMat::Identity(de, de)) + kron(CMat::Identity(dp, dp), h_env_);
}

CMat BipartiteSystem::hamiltonian(double eps) const { return h_local() + eps * h_int_; }

CMat full_evolution(const BipartiteSystem& sys, double eps, double t) { return evolution(sys.hamiltonian(eps), t); }

CMat peeled_evolution(const BipartiteSystem& sys, double eps, double t) {
  // H_P (x) 1 and 1 (x) H_E commute, so their inverse evolutions combine.
  return evolution(sys.h_local(), -t) * full_evolution(sys, eps, t);
}

CMat effective_interaction(const BipartiteSystem& sys, double t) {
  const CMat h0 = sys.h_local();
  if (t == 0.0) return sys.h_int();
  const Eigen::SelfAdjointEigenSolver<CMat> eig(h0);
  const CMat& v = eig.eigenvectors();
  const Eigen::VectorXd& e = eig.eigenvalues();
  CMat h = v.adjoint() * sys.h_int() * v;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index l = 0; l < h.cols(); ++l) {
      const double phase = (e(k) - e(l)) * t;
      // (1/t) int_0^t e^{i w s} ds
      std::complex<double> avg;
      if (std::abs(phase) < 1e-6) {
        avg = 1.0 + 0.5 * I * phase - phase * phase / 6.0;
      } else {
        avg = (std::polar(1.0, phase) - 1.0) / (I * phase);
      }
      h(k, l) *= avg;
    }
  }
  return v * h * v.adjoint();
}

CMat probe_state(const CVec& psi, std::size_t d_probe, std::size_t d_env) {
  const auto m = as_matrix(psi, d_probe, d_env);
  return m * m.adjoint();
}

CMat environment_state(const CVec& psi, std::size_t d_probe, std::size_t d_env) {
  const auto m = as_matrix(psi, d_probe, d_env);
  return m.transpose() * m.conjugate();
}

double schmidt_purity_deficit(const CVec& psi, std::size_t d_probe, std::size_t d_env) {
  const CMat m = as_matrix(psi, d_probe, d_env);
  const Eigen::VectorXd s = Eigen::JacobiSVD<CMat>(m).singularValues();
  // 1 - sum p_i^2 = sum_{i != j} p_i p_j for normalized Schmidt weights p.
  const Eigen::VectorXd p = s.array().square() / s.squaredNorm();
  double cross = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = i + 1; j < p.size(); ++j) cross += p(i) * p(j);
  }
  return 2.0 * cross;
}

double purity_deficit(const BipartiteSystem& sys, double eps, double t) {
  const CVec psi = full_evolution(sys, eps, t) * sys.psi0();
  return schmidt_purity_deficit(psi, sys.d_probe(), sys.d_env());
}

CVec first_order_state(const BipartiteSystem& sys, double eps, double t) {
  const auto dp = static_cast<Eigen::Index>(sys.d_probe());
  const auto de = static_cast<Eigen::Index>(sys.d_env());
  const CMat h = effective_interaction(sys, t);
  // <E0| H~ |E0> as a probe operator.
  CMat reduced = CMat::Zero(dp, dp);
  for (Eigen::Index a = 0; a < dp; ++a) {
    for (Eigen::Index b = 0; b < dp; ++b) {
      reduced(a, b) = sys.env0().dot(h.block(a * de, b * de, de, de) * sys.env0());
    }
  }
  CVec out = sys.probe0() - I * eps * t * (reduced * sys.probe0());
  return out / out.norm();
}

double first_order_infidelity(const BipartiteSystem& sys, double eps, double t) {
  const CVec psi = peeled_evolution(sys, eps, t) * sys.psi0();
  const CMat rho = probe_state(psi, sys.d_probe(), sys.d_env());
  const CVec n = first_order_state(sys, eps, t);
  return 1.0 - n.dot(rho * n).real();
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_fit: x and y differ in length");
  if (x.size() < 3) throw std::invalid_argument("eps: need at least 3 points for a slope fit");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_fit: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("loglog_fit: x values must not all coincide");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

void write_deficit_table(std::ostream& out, const std::vector<double>& eps, const std::vector<double>& deficit) {
  out << "eps,deficit\n";
  for (std::size_t i = 0; i < eps.size() && i < deficit.size(); ++i) {
    out << format_double(eps[i]) << ',' << format_double(deficit[i]) << '\n';
  }
}

}  // namespace qbm
