#include "hormander/darwin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hormander {

double DarwinReport::max_residual() const {
  return std::max({d_transpose, b_symmetric, c_symmetric, ab_commute, ac_commute, unimodular,
                   symplectic, reversible});
}

const char* DarwinReport::first_failure() const {
  if (d_transpose > tol) return "D = A^T";
  if (b_symmetric > tol) return "B = B^T";
  if (c_symmetric > tol) return "C = C^T";
  if (ab_commute > tol) return "AB = BA^T";
  if (ac_commute > tol) return "A^T C = CA";
  if (unimodular > tol) return "A^2 - BC = I";
  if (symplectic > tol) return "symplectic";
  if (reversible > tol) return "Phi = R Phi^-1 R";
  return nullptr;
}

DarwinReport validate_darwin(const ReturnMapBlocks& blocks, double tol) {
  const Matrix phi = blocks.assemble();
  const int n = blocks.n();
  const Matrix& a = blocks.a;
  const Matrix& b = blocks.b;
  const Matrix& c = blocks.c;
  const Matrix& d = blocks.d;

  DarwinReport r;
  r.tol = tol;
  r.d_transpose = norm_inf(d - a.transpose());
  r.b_symmetric = norm_inf(b - b.transpose());
  r.c_symmetric = norm_inf(c - c.transpose());
  r.ab_commute = norm_inf(a * b - b * a.transpose());
  r.ac_commute = norm_inf(a.transpose() * c - c * a);
  r.unimodular = norm_inf(a * a - b * c - Matrix::Identity(n, n));
  r.symplectic = symplectic_residual(phi);
  const Matrix rr = standard_involution(n);
  Eigen::PartialPivLU<Matrix> lu(phi);
  r.reversible = norm_inf(phi - rr * lu.inverse() * rr);
  r.ok = r.max_residual() <= tol;
  return r;
}

double default_darwin_tol(const ReturnMapBlocks& blocks) {
  const double s = std::max(1.0, norm_inf(blocks.assemble()));
  return 1e-8 * s * s;
}

namespace {

Matrix random_symmetric(int n, Rng& rng, double scale) {
  Matrix s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      s(i, j) = s(j, i) = rng.uniform(-scale, scale);
    }
  }
  return s;
}

Matrix random_matrix(int n, Rng& rng, double scale) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-scale, scale);
  }
  return m;
}

}  // namespace

Matrix random_symplectic(int n, Rng& rng, double scale) {
  const Matrix id = Matrix::Identity(n, n);
  const Matrix zero = Matrix::Zero(n, n);

  Matrix upper(2 * n, 2 * n);
  upper << id, random_symmetric(n, rng, scale), zero, id;
  Matrix lower(2 * n, 2 * n);
  lower << id, zero, random_symmetric(n, rng, scale), id;

  // G = I + scale * U is kept well away from singular.
  Matrix g;
  do {
    g = id + random_matrix(n, rng, scale);
  } while (std::abs(g.determinant()) < 0.1);
  Matrix diag(2 * n, 2 * n);
  diag << g, zero, zero, g.inverse().transpose();

  // Cayley transform of the Hamiltonian matrix J S.
  const Matrix h = standard_j(n) * random_symmetric(n * 2, rng, scale);
  const Matrix i2 = Matrix::Identity(2 * n, 2 * n);
  const Matrix cayley = (i2 - 0.5 * h).partialPivLu().solve(i2 + 0.5 * h);

  return upper * diag * lower * cayley;
}

ReturnMapBlocks return_map_from(const Matrix& w) {
  const int n = static_cast<int>(w.rows() / 2);
  const Matrix r = standard_involution(n);
  const Matrix j = standard_j(n);
  const Matrix w_inv = -j * w.transpose() * j;
  return Blocks::split(r * w_inv * r * w);
}

ReturnMapBlocks random_return_map(int n, std::uint64_t seed, double scale) {
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "n must be at least 1");
  Rng rng(seed);
  return return_map_from(random_symplectic(n, rng, scale));
}

Matrix matrix_power(const Matrix& m, int k) {
  require_square(m, "matrix power base");
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

NondegeneracyReport nondegeneracy_check(const ReturnMapBlocks& blocks, int k_max,
                                        std::optional<double> threshold) {
  const Matrix phi = blocks.assemble();
  const Matrix id = Matrix::Identity(phi.rows(), phi.cols());
  const double norm = std::max(1.0, norm_inf(phi));

  NondegeneracyReport rep;
  rep.k_max = k_max;
  rep.ok = true;
  Matrix power = id;
  for (int k = 1; k <= k_max; ++k) {
    power = power * phi;
    const double det = (power - id).determinant();
    const double th = threshold.value_or(1e-10 * std::pow(norm, k));
    const bool good = std::abs(det) > th;
    rep.det_values.push_back(det);
    rep.thresholds.push_back(th);
    rep.nondegenerate.push_back(good);
    rep.ok = rep.ok && good;
  }

  rep.det_c = blocks.c.determinant();
  rep.c_threshold = threshold.value_or(1e-10 * norm);
  rep.c_invertible = std::abs(rep.det_c) > rep.c_threshold;

  // The invertibility lemma only uses ker(Phi - I) and ker(Phi^2 - I).
  const bool first_two_nondegenerate =
      std::abs((phi - id).determinant()) > threshold.value_or(1e-10 * norm) &&
      std::abs((phi * phi - id).determinant()) > threshold.value_or(1e-10 * norm * norm);
  rep.inconsistent = first_two_nondegenerate && !rep.c_invertible;
  return rep;
}

}  // namespace hormander
