#include "hormander/index.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "hormander/chebyshev.hpp"

namespace hormander {

std::string_view to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::Formula: return "formula";
    case IndexMethod::QuadraticForm: return "qform";
    case IndexMethod::PathDifference: return "path";
  }
  return "unknown";
}

namespace {

constexpr double kKappaMax = 1e12;

void require_well_conditioned(const Matrix& m, ErrorCode code, const char* what) {
  const double rc = rcond(m);
  if (!(rc * kKappaMax >= 1.0)) {
    throw Error(code, std::string(what) + " is singular to working precision (rcond " +
                          format_real(rc) + ")");
  }
}

// Also catches matrices that are tiny relative to `scale`, which rcond
// misses (every nonzero 1 x 1 matrix has rcond 1).
void require_nonsingular(const Matrix& m, double scale, ErrorCode code, const char* what) {
  require_well_conditioned(m, code, what);
  const Eigen::JacobiSVD<Matrix> svd(m);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > scale / kKappaMax)) {
    throw Error(code, std::string(what) + " is singular relative to the iterate (sigma_min " +
                          format_real(smin) + ")");
  }
}

using ExtMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// (I - T_k(A)) (C U_{k-1}(A))^{-1} in extended precision. C_k is typically
// conditioned like ||Phi^k||, so double rounding in the recursion alone
// breaks the symmetry of M beyond the 1e-7 check for k ~ 6.
Matrix extended_sign_matrix(const ReturnMapBlocks& blocks, int k) {
  const ExtMatrix a = blocks.a.cast<long double>();
  const ExtMatrix id = ExtMatrix::Identity(a.rows(), a.cols());
  ExtMatrix t_prev = id, t = a, u_prev = id, u = 2.0L * a;
  for (int j = 2; j <= k; ++j) {
    ExtMatrix t_next = 2.0L * a * t - t_prev;
    t_prev = std::move(t);
    t = std::move(t_next);
    ExtMatrix u_next = 2.0L * a * u - u_prev;
    u_prev = std::move(u);
    u = std::move(u_next);
  }
  // After the loop t = T_k and u_prev = U_{k-1} (U_0 = I when k = 1).
  const ExtMatrix ck = blocks.c.cast<long double>() * u_prev;
  const ExtMatrix mt = ck.transpose().partialPivLu().solve((id - t).transpose());
  return mt.transpose().cast<double>();
}

}  // namespace

Matrix hormander_sign_matrix(const ReturnMapBlocks& blocks, int k) {
  if (k < 1) throw Error(ErrorCode::DimensionMismatch, "iterate index must be at least 1");
  const double phi_norm = std::max(1.0, norm_inf(blocks.assemble()));
  require_nonsingular(blocks.c, phi_norm, ErrorCode::CSingular, "C");

  const ChebTable tab = cheb_matrix_table(k, blocks.a);
  const Matrix& u = tab.u[k - 1];
  require_well_conditioned(u, ErrorCode::IterateDegenerate, "U_{k-1}(A)");

  // M = (I - T_k) N^{-1} with N = C U_{k-1}(A), the lower-left block of Phi^k.
  const Matrix ck = blocks.c * u;
  const Blocks iterate{tab.t[k], u * blocks.b, ck, tab.t[k].transpose()};
  const double iterate_norm = std::max(1.0, norm_inf(iterate.assemble()));
  require_nonsingular(ck, iterate_norm, ErrorCode::IterateDegenerate, "C U_{k-1}(A)");
  const Matrix m = extended_sign_matrix(blocks, k);

  const double asym = norm_inf(m - m.transpose());
  if (asym > 1e-7 * norm_inf(m)) {
    throw Error(ErrorCode::AsymmetryTooLarge,
                "sign matrix asymmetry " + format_real(asym) + " relative to norm " +
                    format_real(norm_inf(m)));
  }
  return 0.5 * (m + m.transpose());
}

IndexResult hormander_index_formula(const ReturnMapBlocks& blocks, int k,
                                    std::optional<double> tol) {
  const Matrix m = hormander_sign_matrix(blocks, k);
  IndexResult r;
  r.k = k;
  r.method = IndexMethod::Formula;
  r.inertia = inertia(m, tol);
  if (r.inertia.n_zero > 0) {
    throw Error(ErrorCode::DegenerateForm,
                "sign matrix has " + std::to_string(r.inertia.n_zero) + " near-zero eigenvalue(s)");
  }
  r.s = HalfInteger::from_doubled(r.inertia.signature());
  return r;
}

namespace {

struct DuistermaatParts {
  Matrix q;
  // ||J (Phi - I)|| ||V||: size of the terms that cancel in Q.
  double term_scale = 0.0;
};

DuistermaatParts duistermaat_parts(const Matrix& phi) {
  require_square(phi, "return map");
  require_finite(phi, "return map");
  if (phi.rows() % 2 != 0) throw Error(ErrorCode::OddDimension, "return map has odd dimension");
  const Eigen::Index n = phi.rows() / 2;
  const Matrix id = Matrix::Identity(2 * n, 2 * n);
  require_well_conditioned(phi - id, ErrorCode::NotTransverse, "Phi - I");

  // For z = (u, u) the partner Gamma z = (v, Phi v) must satisfy
  // p(u + v) = 0 and p(u + Phi v) = 0, where p extracts the R^n momentum part.
  Matrix system(2 * n, 2 * n);
  system.topRows(n) = id.bottomRows(n);
  system.bottomRows(n) = phi.bottomRows(n);
  require_well_conditioned(system, ErrorCode::CSingular, "transversality system");
  ExtMatrix rhs(2 * n, 2 * n);
  rhs.topRows(n) = -ExtMatrix::Identity(2 * n, 2 * n).bottomRows(n);
  rhs.bottomRows(n) = rhs.topRows(n);
  const ExtMatrix v = system.cast<long double>().partialPivLu().solve(rhs);

  // Q(z_i, z_j) = Omega(z_i, Gamma z_j) with Omega = (-omega) x omega,
  //             = -omega(u_i, v_j) + omega(u_i, Phi v_j).
  const ExtMatrix jm =
      standard_j(static_cast<int>(n)).cast<long double>() * (phi - id).cast<long double>();
  DuistermaatParts out;
  out.q = (jm * v).cast<double>();
  out.term_scale = static_cast<double>(jm.cwiseAbs().rowwise().sum().maxCoeff() *
                                       v.cwiseAbs().rowwise().sum().maxCoeff());
  return out;
}

// Rounding of a double-precision Phi alone leaves an asymmetry of a few ulps
// of the cancelling terms; a non-symplectic input leaves far more.
constexpr double kRoundingUlps = 1e3;

}  // namespace

Matrix duistermaat_form(const Matrix& phi) { return duistermaat_parts(phi).q; }

IndexResult hormander_index_quadratic_form(const Matrix& phi, std::optional<double> tol) {
  const DuistermaatParts parts = duistermaat_parts(phi);
  const Matrix& q = parts.q;
  const Eigen::Index n = phi.rows() / 2;
  const double qnorm = norm_inf(q);
  const double asym = norm_inf(q - q.transpose());
  const double rounding = kRoundingUlps * std::numeric_limits<double>::epsilon() * parts.term_scale;
  if (asym > 1e-7 * qnorm + rounding) {
    throw Error(ErrorCode::QNotSymmetric, "asymmetry " + format_real(asym) +
                                              " relative to norm " + format_real(qnorm));
  }
  IndexResult r;
  r.k = 1;
  r.method = IndexMethod::QuadraticForm;
  r.inertia = inertia(0.5 * (q + q.transpose()), tol);
  if (r.inertia.n_zero != n) {
    throw Error(ErrorCode::DegenerateForm, "expected a kernel of dimension " + std::to_string(n) +
                                               ", found " + std::to_string(r.inertia.n_zero));
  }
  r.s = HalfInteger::from_doubled(-r.inertia.signature());
  return r;
}

ClosedFormV closed_form_v(const ReturnMapBlocks& blocks, const Vector& u2) {
  const Eigen::Index n = blocks.n();
  if (u2.size() != n) throw Error(ErrorCode::DimensionMismatch, "u2 must have length n");
  const Vector w = guarded_solve(blocks.c, u2, ErrorCode::CSingular);
  const Matrix id = Matrix::Identity(n, n);
  ClosedFormV out;
  out.v.resize(2 * n);
  out.v << (blocks.a - id) * w, -u2;
  out.phi_v.resize(2 * n);
  out.phi_v << (id - blocks.a) * w, -u2;
  return out;
}

}  // namespace hormander
