#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hormander/linalg.hpp"
#include "hormander/rng.hpp"

namespace hormander {

/// Blocks (A, B, C, D) of a reduced return map of a symmetric periodic orbit,
/// expressed in a symplectic basis adapted to the fixed Lagrangian L+ and its
/// partner L-. Valid instances satisfy
///
///   D = A^T,  B = B^T,  C = C^T,  AB = BA^T,  A^T C = CA,  A^2 - BC = I,
///
/// equivalently Phi is symplectic and Phi = R Phi^{-1} R with R = diag(I, -I).
using ReturnMapBlocks = Blocks;

/// Residuals (infinity norm) of each block identity.
struct DarwinReport {
  double d_transpose = 0;   // D - A^T
  double b_symmetric = 0;   // B - B^T
  double c_symmetric = 0;   // C - C^T
  double ab_commute = 0;    // AB - BA^T
  double ac_commute = 0;    // A^T C - CA
  double unimodular = 0;    // A^2 - BC - I
  double symplectic = 0;    // Phi^T J Phi - J
  double reversible = 0;    // Phi - R Phi^{-1} R
  double tol = 0;
  bool ok = false;

  double max_residual() const;
  /// Name of the first identity whose residual exceeds tol, or nullptr.
  const char* first_failure() const;
};

/// Throws DimensionMismatch for unequal or non-square blocks.
DarwinReport validate_darwin(const ReturnMapBlocks& blocks, double tol);

/// Tolerance used when loading blocks from outside: 1e-8 * max(1, ||Phi||)^2.
double default_darwin_tol(const ReturnMapBlocks& blocks);

/// Random symplectic matrix: a product of a symmetric upper shear, a
/// block-diagonal factor diag(G, G^{-T}), a lower shear and a Cayley factor,
/// all with entries bounded by scale.
Matrix random_symplectic(int n, Rng& rng, double scale);

/// Phi = (R W^{-1} R) W for symplectic W. Such Phi is symplectic and satisfies
/// Phi = R Phi^{-1} R by construction.
ReturnMapBlocks return_map_from(const Matrix& w);

ReturnMapBlocks random_return_map(int n, std::uint64_t seed, double scale);

Matrix matrix_power(const Matrix& m, int k);

struct NondegeneracyReport {
  int k_max = 0;
  std::vector<double> det_values;   // det(Phi^k - I), k = 1..k_max
  std::vector<double> thresholds;
  std::vector<bool> nondegenerate;  // |det| > threshold per k
  bool ok = false;
  double det_c = 0;
  double c_threshold = 0;
  bool c_invertible = false;
  /// k = 1 and k = 2 are nondegenerate yet C is numerically singular, which
  /// contradicts the invertibility lemma; signals bad input or tolerances.
  bool inconsistent = false;
};

/// Evaluates det(Phi^k - I) with exact matrix powers. The default threshold
/// for iterate k is 1e-10 * max(1, ||Phi||_inf^k); C is compared against the
/// k = 1 threshold. An explicit threshold replaces all of them.
NondegeneracyReport nondegeneracy_check(const ReturnMapBlocks& blocks, int k_max,
                                        std::optional<double> threshold = std::nullopt);

}  // namespace hormander
