#pragma once

#include <utility>

#include "hormander/darwin.hpp"
#include "hormander/linalg.hpp"

namespace hormander {

enum class ChebKind { First, Second };

/// T_k(x) or U_k(x) by the three-term recurrence
///   P_{k+1}(x) = 2x P_k(x) - P_{k-1}(x),  T_0 = U_0 = 1, T_1 = x, U_1 = 2x.
double cheb_scalar(ChebKind kind, int k, double x);

/// Same recurrence with x replaced by the square matrix a and 1 by I.
Matrix cheb_matrix(ChebKind kind, int k, const Matrix& a);

/// T_0..T_k(a) and U_0..U_k(a) in one pass.
struct ChebTable {
  std::vector<Matrix> t;
  std::vector<Matrix> u;
};
ChebTable cheb_matrix_table(int k, const Matrix& a);

/// Blocks of Phi^k for valid reversible blocks:
///   (T_k(A), U_{k-1}(A) B, C U_{k-1}(A), T_k(A^T)).
/// Throws InvalidBlocks when the input fails validate_darwin at
/// default_darwin_tol, DimensionMismatch for k < 1.
ReturnMapBlocks iterate_blocks(const ReturnMapBlocks& blocks, int k);

/// (cos k alpha, sin((k+1) alpha) / sin alpha), the closed forms of
/// T_k(cos alpha) and U_k(cos alpha). AlphaDegenerate if |sin alpha| < 1e-12.
std::pair<double, double> cheb_trig_reference(int k, double alpha);

}  // namespace hormander
