#pragma once

// Reference computations used by the tests. None of them call into the code
// under test except for plain data types.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "hormander/linalg.hpp"
#include "hormander/rng.hpp"

namespace testing {

using hormander::Matrix;
using hormander::Vector;

// Characteristic polynomial det(xI - M) by Faddeev-LeVerrier, coefficients
// of x^m, x^{m-1}, ..., x^0, in long double.
inline std::vector<long double> char_poly(const Matrix& m) {
  const Eigen::Index n = m.rows();
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const LMat a = m.cast<long double>();
  std::vector<long double> c(static_cast<std::size_t>(n + 1), 0.0L);
  c[0] = 1.0L;
  LMat mk = LMat::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = a * mk + c[static_cast<std::size_t>(k - 1)] * LMat::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * mk).trace() / static_cast<long double>(k);
  }
  return c;
}

struct Counts {
  int pos = 0, neg = 0, zero = 0;
};

// Inertia of a symmetric matrix from its characteristic polynomial: all roots
// are real, so Descartes' rule of signs is exact. Coefficients below
// zero_tol (relative to the largest) count as zero.
inline Counts inertia_by_sign_changes(const Matrix& m, long double zero_tol = 1e-12L) {
  std::vector<long double> c = char_poly(m);
  long double big = 0;
  for (auto x : c) big = std::max(big, std::abs(x));
  for (auto& x : c) {
    if (std::abs(x) < zero_tol * big) x = 0;
  }
  Counts out;
  while (!c.empty() && c.back() == 0) {
    c.pop_back();
    ++out.zero;
  }
  auto changes = [](const std::vector<long double>& p) {
    int count = 0, last = 0;
    for (auto x : p) {
      const int s = (x > 0) - (x < 0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  out.pos = changes(c);
  std::vector<long double> neg = c;
  const std::size_t deg = c.size() - 1;
  for (std::size_t i = 0; i < neg.size(); ++i) {
    if ((deg - i) % 2 == 1) neg[i] = -neg[i];
  }
  out.neg = changes(neg);
  return out;
}

inline Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline Matrix naive_power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

inline Matrix random_matrix(hormander::Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1,
                            double hi = 1) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline Matrix random_symmetric(hormander::Rng& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

inline Matrix j_matrix(Eigen::Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// 1/2 sign(tan(k theta / 2)) as a doubled integer.
inline int rotation_index_doubled(double theta, int k) {
  const double t = std::tan(0.5 * k * theta);
  return (t > 0) - (t < 0);
}

}  // namespace testing
