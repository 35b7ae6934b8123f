#pragma once

// Finite-dimensional probe/environment systems H = H_P + H_E + eps H_I, used
// to show that probe-environment entanglement starts at second order in eps.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace qbm {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Largest supported dP * dE.
inline constexpr std::size_t kMaxProductDimension = 256;

CMat commutator(const CMat& a, const CMat& b);

/// Dense matrix exponential (scaling and squaring with Pade approximants).
CMat expm(const CMat& a);

/// Third-order Zassenhaus factors: e^{A+B} = e^A e^B e^{C2} e^{C3} + O(4),
/// C2 = -[A,B]/2, C3 = [B,[A,B]]/3 + [A,[A,B]]/6. Throws on shape mismatch.
struct ZassenhausTerms {
  CMat c2;
  CMat c3;
};
ZassenhausTerms zassenhaus_terms(const CMat& a, const CMat& b);

/// Operator norm of e^{h(A+B)} - e^{hA} e^{hB} e^{C2(hA,hB)} e^{C3(hA,hB)}.
double zassenhaus_residual(const CMat& a, const CMat& b, double h);

class BipartiteSystem {
 public:
  /// Throws unless each Hamiltonian is Hermitian (1e-12), shapes agree,
  /// dP * dE <= kMaxProductDimension and both factors are normalized.
  BipartiteSystem(CMat h_probe, CMat h_env, CMat h_int, CVec probe0, CVec env0);

  /// Hamiltonians drawn from a Gaussian ensemble and random initial
  /// factors, reproducible from `seed` (std::mt19937_64).
  static BipartiteSystem random(std::size_t d_probe, std::size_t d_env, std::uint64_t seed);

  /// H_I = f(H_P) (x) H_B with H_E, H_B diagonal and |E0> a basis vector:
  /// H_I commutes with H_P + H_E and never entangles the product state.
  static BipartiteSystem commuting(std::size_t d_probe, std::size_t d_env, std::uint64_t seed);

  std::size_t d_probe() const { return static_cast<std::size_t>(h_probe_.rows()); }
  std::size_t d_env() const { return static_cast<std::size_t>(h_env_.rows()); }
  const CMat& h_probe() const { return h_probe_; }
  const CMat& h_env() const { return h_env_; }
  const CMat& h_int() const { return h_int_; }
  const CVec& probe0() const { return probe0_; }
  const CVec& env0() const { return env0_; }
  /// |N0> (x) |E0>, probe index major.
  CVec psi0() const;
  /// H_P (x) 1 + 1 (x) H_E.
  CMat h_local() const;
  CMat hamiltonian(double eps) const;

 private:
  CMat h_probe_;
  CMat h_env_;
  CMat h_int_;
  CVec probe0_;
  CVec env0_;
};

/// Kronecker product, first factor major.
CMat kron(const CMat& a, const CMat& b);

/// e^{-i H t} for the full Hamiltonian.
CMat full_evolution(const BipartiteSystem& sys, double eps, double t);

/// U'_t = e^{+i H_P t} e^{+i H_E t} e^{-i H t}.
CMat peeled_evolution(const BipartiteSystem& sys, double eps, double t);

/// First-order generator of U'_t: the interaction-picture average
/// (1/t) int_0^t e^{i H0 s} H_I e^{-i H0 s} ds, so U'_t = e^{-i eps t H~} + O(eps^2).
CMat effective_interaction(const BipartiteSystem& sys, double t);

/// Probe reduced density matrix of a joint state.
CMat probe_state(const CVec& psi, std::size_t d_probe, std::size_t d_env);
CMat environment_state(const CVec& psi, std::size_t d_probe, std::size_t d_env);

/// 1 - Tr rho^2 from the Schmidt coefficients, so it is symmetric between
/// the two factors and nonnegative.
double schmidt_purity_deficit(const CVec& psi, std::size_t d_probe, std::size_t d_env);

/// Probe purity deficit after evolving psi0 under the full U_t.
double purity_deficit(const BipartiteSystem& sys, double eps, double t);

/// Normalized (I - i eps t <E0|H~|E0>) |N0>.
CVec first_order_state(const BipartiteSystem& sys, double eps, double t);

/// 1 - <N~|rho'|N~> with rho' the probe state of U'_t |psi0>.
double first_order_infidelity(const BipartiteSystem& sys, double eps, double t);

struct SlopeFit {
  double slope;
  double intercept;
};

/// Least-squares line through (ln x, ln y). Throws with fewer than 3 points
/// or non-positive values.
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// CSV `eps,deficit` with a header line.
void write_deficit_table(std::ostream& out, const std::vector<double>& eps, const std::vector<double>& deficit);

}  // namespace qbm
