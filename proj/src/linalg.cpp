#include "hormander/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/QR>

namespace hormander {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateForm: return "DegenerateForm";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InvalidBlocks: return "InvalidBlocks";
    case ErrorCode::CSingular: return "CSingular";
    case ErrorCode::IterateDegenerate: return "IterateDegenerate";
    case ErrorCode::AsymmetryTooLarge: return "AsymmetryTooLarge";
    case ErrorCode::NotTransverse: return "NotTransverse";
    case ErrorCode::QNotSymmetric: return "QNotSymmetric";
    case ErrorCode::AlphaDegenerate: return "AlphaDegenerate";
    case ErrorCode::UnresolvedCrossing: return "UnresolvedCrossing";
    case ErrorCode::DegenerateEndpoint: return "DegenerateEndpoint";
    case ErrorCode::PathDependence: return "PathDependence";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::EnergyDriftExceeded: return "EnergyDriftExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CriticalPoint: return "CriticalPoint";
    case ErrorCode::NotOnFixedSet: return "NotOnFixedSet";
    case ErrorCode::DegenerateTransversal: return "DegenerateTransversal";
    case ErrorCode::UnequalEigenspaces: return "UnequalEigenspaces";
    case ErrorCode::ProjectionIllConditioned: return "ProjectionIllConditioned";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

double norm_inf(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double default_zero_tol(const Matrix& m) {
  return std::max(1e-8 * norm_inf(m), std::numeric_limits<double>::min());
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::NonSquare, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

Inertia inertia(const Matrix& m, std::optional<double> tol) {
  require_square(m, "inertia input");
  require_finite(m, "inertia input");
  const double zero = tol.value_or(default_zero_tol(m));
  const double asym = norm_inf(m - m.transpose());
  if (asym > zero) {
    throw Error(ErrorCode::AsymmetryTooLarge,
                "matrix is not symmetric within tolerance (asymmetry " + format_real(asym) + ")");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  Inertia out;
  for (double ev : es.eigenvalues()) {
    if (ev > zero) {
      ++out.n_pos;
    } else if (ev < -zero) {
      ++out.n_neg;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

int signature(const Matrix& m, std::optional<double> tol) {
  const Inertia in = inertia(m, tol);
  if (in.n_zero > 0) {
    throw Error(ErrorCode::DegenerateForm,
                std::to_string(in.n_zero) + " eigenvalue(s) inside the zero band");
  }
  return in.signature();
}

Matrix standard_j(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

double omega(const Vector& x, const Vector& y) {
  const Eigen::Index n = x.size() / 2;
  return x.head(n).dot(y.tail(n)) - x.tail(n).dot(y.head(n));
}

double symplectic_residual(const Matrix& phi) {
  require_square(phi, "symplectic candidate");
  if (phi.rows() % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "dimension " + std::to_string(phi.rows()) + " is odd");
  }
  const Matrix j = standard_j(static_cast<int>(phi.rows() / 2));
  return norm_inf(phi.transpose() * j * phi - j);
}

bool is_symplectic(const Matrix& phi, double tol) { return symplectic_residual(phi) <= tol; }

Matrix standard_involution(int n) {
  Matrix r = Matrix::Identity(2 * n, 2 * n);
  r.bottomRightCorner(n, n) *= -1.0;
  return r;
}

double rcond(const Matrix& a) {
  require_square(a, "rcond input");
  Eigen::PartialPivLU<Matrix> lu(a);
  return lu.rcond();
}

Matrix guarded_solve(const Matrix& a, const Matrix& b, ErrorCode code, double kappa_max) {
  require_square(a, "linear system");
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc * kappa_max >= 1.0)) {
    throw Error(code, "condition estimate " + format_real(rc > 0 ? 1.0 / rc : INFINITY) +
                          " exceeds " + format_real(kappa_max));
  }
  return lu.solve(b);
}

Matrix orthonormalize(const Matrix& z) {
  const Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

int Blocks::n() const { return static_cast<int>(a.rows()); }

Matrix Blocks::assemble() const {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n || c.rows() != n || c.cols() != n ||
      d.rows() != n || d.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "blocks must be square and of equal size");
  }
  Matrix phi(2 * n, 2 * n);
  phi << a, b, c, d;
  return phi;
}

Blocks Blocks::split(const Matrix& phi) {
  require_square(phi, "block matrix");
  if (phi.rows() % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "dimension " + std::to_string(phi.rows()) + " is odd");
  }
  const Eigen::Index n = phi.rows() / 2;
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, n), phi.bottomLeftCorner(n, n),
          phi.bottomRightCorner(n, n)};
}

Blocks symplectic_inverse(const Blocks& blocks, std::optional<double> tol) {
  const Matrix phi = blocks.assemble();
  const double scale = std::max(1.0, norm_inf(phi));
  const double limit = tol.value_or(1e-9 * scale * scale);
  const double res = symplectic_residual(phi);
  if (res > limit) {
    throw Error(ErrorCode::NotSymplectic, "residual " + format_real(res) + " exceeds " +
                                              format_real(limit));
  }
  return {blocks.d.transpose(), -blocks.b.transpose(), -blocks.c.transpose(), blocks.a.transpose()};
}

Matrix null_space(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cut = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace hormander
