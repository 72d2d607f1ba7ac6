#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hormander/error.hpp"

namespace hormander {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalue counts of a symmetric form split at a zero threshold.
struct Inertia {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;

  int signature() const { return n_pos - n_neg; }
  int dimension() const { return n_pos + n_neg + n_zero; }
  bool operator==(const Inertia&) const = default;
};

/// Maximum absolute row sum.
double norm_inf(const Matrix& m);

/// Default zero threshold for inertia: 1e-8 * ||M||_inf (floored at the
/// smallest normal double so the zero matrix still has a positive threshold).
double default_zero_tol(const Matrix& m);

/// Counts eigenvalues of (M + M^T)/2 above tol, below -tol and in between.
/// Throws NonSquare or NonFinite; AsymmetryTooLarge when ||M - M^T||_inf
/// exceeds tol (callers symmetrize first).
Inertia inertia(const Matrix& m, std::optional<double> tol = std::nullopt);

/// n_pos - n_neg, refusing forms with eigenvalues inside the zero band
/// (DegenerateForm): index values are discrete and must never be rounded.
int signature(const Matrix& m, std::optional<double> tol = std::nullopt);

/// Standard structure matrix J = [[0, I], [-I, 0]] of R^n x R^n, so that
/// omega(x, y) = x^T J y and X_H = J grad H.
Matrix standard_j(int n);

/// omega(x, y) for the standard structure.
double omega(const Vector& x, const Vector& y);

/// ||Phi^T J Phi - J||_inf.
double symplectic_residual(const Matrix& phi);

bool is_symplectic(const Matrix& phi, double tol);

/// R = diag(I, -I), the standard linear antisymplectic involution.
Matrix standard_involution(int n);

void require_square(const Matrix& m, const char* what);
void require_finite(const Matrix& m, const char* what);

/// Solves A X = B by partial-pivot LU and throws IllConditioned (or the
/// supplied code) when the reciprocal condition estimate is below 1/kappa_max.
Matrix guarded_solve(const Matrix& a, const Matrix& b, ErrorCode code = ErrorCode::IllConditioned,
                     double kappa_max = 1e12);

/// A 2n x 2n matrix split along R^n x R^n as [[a, b], [c, d]].
struct Blocks {
  Matrix a, b, c, d;

  int n() const;
  /// Throws DimensionMismatch unless all four blocks are n x n.
  Matrix assemble() const;
  static Blocks split(const Matrix& phi);
};

/// Inverse of a symplectic matrix in block form: (D^T, -B^T, -C^T, A^T).
/// Throws NotSymplectic when ||Phi^T J Phi - J||_inf exceeds tol
/// (default 1e-9 * max(1, ||Phi||_inf)^2).
Blocks symplectic_inverse(const Blocks& blocks, std::optional<double> tol = std::nullopt);

/// Reciprocal condition number estimate of a square matrix in the 1-norm.
double rcond(const Matrix& a);

/// Orthonormal basis of the column span of Z: the Q factor of Z = QR with
/// diag(R) > 0, so it depends continuously on Z.
Matrix orthonormalize(const Matrix& z);

/// Orthonormal basis of the null space of m (singular values <= rel_tol * sigma_max).
Matrix null_space(const Matrix& m, double rel_tol = 1e-10);

}  // namespace hormander
