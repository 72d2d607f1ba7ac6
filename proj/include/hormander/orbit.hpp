#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hormander/darwin.hpp"
#include "hormander/linalg.hpp"

namespace hormander {

/// Autonomous Hamiltonian system on R^{2m}, coordinates (q_1..q_m, p_1..p_m),
/// with a linear antisymplectic involution leaving H invariant.
struct HamiltonianSystem {
  std::string name;
  int dim = 0;  // 2m
  std::function<double(const Vector&)> hamiltonian;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  Matrix involution;

  Vector vector_field(const Vector& x) const;

  /// H = (p1^2 + p2^2)/2 + (w1^2 q1^2 + w2^2 q2^2)/2, rho = diag(1, -1, -1, 1).
  static HamiltonianSystem oscillator(double omega1, double omega2);

  /// H = (p1^2 + p2^2)/2 + (q1^2 + q2^2)/2 + q1^2 q2 - q2^3/3,
  /// rho = diag(-1, 1, 1, -1).
  static HamiltonianSystem henon_heiles();
};

/// Checks rho^2 = I, rho^T J rho = -J, H o rho = H and rho X_H rho = -X_H on
/// random sample points. Throws NotSymplectic or MalformedInput.
void validate_system(const HamiltonianSystem& sys, std::uint64_t seed = 1, int samples = 16,
                     double tol = 1e-10);

struct FlowSample {
  double t = 0;
  Vector x;
};

struct VariationalFlow {
  std::vector<FlowSample> trajectory;  // accepted steps, including both ends
  Vector x_end;
  Matrix fundamental;                  // d phi^T at x0
  double energy_drift = 0;             // max |H(x(t)) - H(x0)| over accepted steps
  double symplectic_residual = 0;      // ||M^T J M - J||_inf
};

/// Integrates x' = J grad H together with M' = J Hess H(x) M, M(0) = I, with
/// an adaptive Runge-Kutta-Fehlberg 7(8) pair at per-step tolerance tol.
/// Throws StepFailure (no acceptable step, non-finite state) or
/// EnergyDriftExceeded (drift > 10 tol max(1, |H(x0)|)).
VariationalFlow integrate_with_variations(const HamiltonianSystem& sys, const Vector& x0, double t,
                                          double tol);

struct SymmetricOrbit {
  Vector x;             // on Fix(rho)
  double eta = 0;       // period
  double energy = 0;
  double residual = 0;  // |phi^eta(x) - x|
  int iterations = 0;
};

struct OrbitSearchOptions {
  int max_iterations = 40;
  double integration_tol = 1e-12;
};

/// Newton shooting for a symmetric periodic orbit through Fix(rho) at the
/// energy of seed_point: unknowns are x in Fix(rho) and the half period tau,
/// equations phi^tau(x) in Fix(rho) and H(x) = H(seed_point). Throws
/// NotOnFixedSet, CriticalPoint or NoConvergence.
SymmetricOrbit find_symmetric_orbit(const HamiltonianSystem& sys, const Vector& seed_point,
                                    double half_period_guess, double tol,
                                    const OrbitSearchOptions& opts = {});

struct TransverseSection {
  Matrix basis_plus;   // e_1..e_n as columns, rho e_i = e_i
  Matrix basis_minus;  // f_1..f_n as columns, rho f_i = -f_i, omega(e_i, f_j) = delta_ij
  Vector v_aux;        // v = w + rho w with dH(x) v != 0
  Matrix symplectic_basis_matrix;  // [E F], 2m x 2n
  int attempts = 0;                // samples of w used
};

/// V = {v, X_H(x)}^omega split into the eigenspaces L+ and L- of rho, with
/// e_i an orthonormal basis of L+ and f = F0 (E^T J F0)^{-1}. `w` overrides
/// the random sample. Throws CriticalPoint, DegenerateTransversal,
/// UnequalEigenspaces or ProjectionIllConditioned.
TransverseSection build_transverse_section(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                                           std::uint64_t seed = 1,
                                           const std::optional<Vector>& w = std::nullopt);

/// Residuals of a section: max |omega(e_i, f_j) - delta_ij|, isotropy of E and
/// F, rho-eigenvector and omega-orthogonality to v and X_H.
struct SectionReport {
  double pairing = 0;
  double isotropy = 0;
  double eigen = 0;
  double orthogonality = 0;
  double max_residual() const;
};

SectionReport check_section(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                            const TransverseSection& section);

/// Matrix of the linearized return map d phi^eta(x) on V in the basis (e, f),
/// projected along span{v, X_H(x)}. Also returns R in that basis.
struct ReducedMonodromy {
  ReturnMapBlocks blocks;
  Matrix full_monodromy;
  Matrix involution_in_basis;  // should be diag(I, -I)
  double reversibility = 0;    // ||M - rho M^{-1} rho||_inf
};

/// Throws ProjectionIllConditioned when the section basis is numerically
/// degenerate and InvalidBlocks when the result fails validate_darwin at 1e-6.
ReducedMonodromy reduced_monodromy(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                                   const TransverseSection& section, double integration_tol = 1e-12);

}  // namespace hormander
