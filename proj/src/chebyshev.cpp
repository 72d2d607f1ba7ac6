#include "hormander/chebyshev.hpp"

#include <cmath>
#include <string>

namespace hormander {

double cheb_scalar(ChebKind kind, int k, double x) {
  if (k < 0) throw Error(ErrorCode::DimensionMismatch, "polynomial degree must be non-negative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = kind == ChebKind::First ? x : 2.0 * x;
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Matrix cheb_matrix(ChebKind kind, int k, const Matrix& a) {
  require_square(a, "Chebyshev argument");
  if (k < 0) throw Error(ErrorCode::DimensionMismatch, "polynomial degree must be non-negative");
  Matrix prev = Matrix::Identity(a.rows(), a.cols());
  if (k == 0) return prev;
  Matrix cur = kind == ChebKind::First ? a : Matrix(2.0 * a);
  for (int j = 1; j < k; ++j) {
    Matrix next = 2.0 * a * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

ChebTable cheb_matrix_table(int k, const Matrix& a) {
  require_square(a, "Chebyshev argument");
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  ChebTable tab;
  tab.t.push_back(id);
  tab.u.push_back(id);
  if (k >= 1) {
    tab.t.push_back(a);
    tab.u.push_back(2.0 * a);
  }
  for (int j = 2; j <= k; ++j) {
    tab.t.push_back(2.0 * a * tab.t[j - 1] - tab.t[j - 2]);
    tab.u.push_back(2.0 * a * tab.u[j - 1] - tab.u[j - 2]);
  }
  return tab;
}

ReturnMapBlocks iterate_blocks(const ReturnMapBlocks& blocks, int k) {
  if (k < 1) throw Error(ErrorCode::DimensionMismatch, "iterate index must be at least 1");
  const DarwinReport rep = validate_darwin(blocks, default_darwin_tol(blocks));
  if (!rep.ok) {
    throw Error(ErrorCode::InvalidBlocks, std::string("identity ") + rep.first_failure() + " fails");
  }
  const Matrix t = cheb_matrix(ChebKind::First, k, blocks.a);
  const Matrix u = cheb_matrix(ChebKind::Second, k - 1, blocks.a);
  return {t, u * blocks.b, blocks.c * u, t.transpose()};
}

std::pair<double, double> cheb_trig_reference(int k, double alpha) {
  const double s = std::sin(alpha);
  if (std::abs(s) < 1e-12) {
    throw Error(ErrorCode::AlphaDegenerate, "sin(alpha) = " + format_real(s));
  }
  return {std::cos(k * alpha), std::sin((k + 1) * alpha) / s};
}

}  // namespace hormander
