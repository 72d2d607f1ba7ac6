#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hormander/darwin.hpp"
#include "hormander/maslov.hpp"
#include "hormander/rng.hpp"

namespace hormander {

namespace {

// t -> P^t Q(t) for the polar decomposition X = P Q: P symmetric positive
// definite symplectic, Q orthogonal symplectic, identified with the unitary
// U = Q_11 + i Q_21. The logarithm of U is taken branch-wise on its
// eigenvalues; shifting one eigen-angle by 2 pi changes the homotopy class of
// the path but not its endpoints.
class PolarPath {
 public:
  PolarPath(const Matrix& x, Rng& rng) : n_(static_cast<int>(x.rows() / 2)) {
    // X = W S V^T gives P = W S W^T and Q = W V^T without squaring X.
    const Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    v_ = svd.matrixU();
    log_s_ = svd.singularValues().array().log().matrix();
    if (!log_s_.allFinite()) throw Error(ErrorCode::IllConditioned, "path factor is singular");
    const Matrix q = svd.matrixU() * svd.matrixV().transpose();

    Eigen::MatrixXcd u(n_, n_);
    u.real() = q.topLeftCorner(n_, n_);
    u.imag() = q.bottomLeftCorner(n_, n_);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
    z_ = schur.matrixU();
    angles_.resize(n_);
    for (int j = 0; j < n_; ++j) angles_(j) = std::arg(schur.matrixT()(j, j));
    if (rng.uniform() < 0.5) {
      const int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n_));
      angles_(j) += (rng.uniform() < 0.5 ? -2.0 : 2.0) * std::numbers::pi;
    }
  }

  Matrix operator()(double t) const {
    const Matrix pt = v_ * (t * log_s_).array().exp().matrix().asDiagonal() * v_.transpose();
    Eigen::VectorXcd phase(n_);
    for (int j = 0; j < n_; ++j) phase(j) = std::polar(1.0, t * angles_(j));
    const Eigen::MatrixXcd ut = z_ * phase.asDiagonal() * z_.adjoint();
    Matrix qt(2 * n_, 2 * n_);
    qt << ut.real(), -ut.imag(), ut.imag(), ut.real();
    return pt * qt;
  }

 private:
  int n_;
  Matrix v_;
  Vector log_s_;
  Eigen::MatrixXcd z_;
  Vector angles_;
};

Matrix cayley(const Matrix& hamiltonian) {
  const Eigen::Index m = hamiltonian.rows();
  const Matrix id = Matrix::Identity(m, m);
  return (id - 0.5 * hamiltonian).partialPivLu().solve(id + 0.5 * hamiltonian);
}

// Both indices sample the same path at (mostly) the same parameters.
SymplecticPath memoized(SymplecticPath path) {
  auto cache = std::make_shared<std::unordered_map<double, Matrix>>();
  auto eval = std::move(path.eval);
  path.eval = [cache, eval](double t) -> Matrix {
    const auto it = cache->find(t);
    if (it != cache->end()) return it->second;
    return cache->emplace(t, eval(t)).first->second;
  };
  return path;
}

}  // namespace

SymplecticPath generate_path(const Matrix& phi, std::uint64_t seed) {
  const int n = static_cast<int>(phi.rows() / 2);
  graph_frame(phi);
  Rng rng(seed);

  const Matrix via = random_symplectic(n, rng, 0.5);
  const Matrix j = standard_j(n);
  const Matrix rest = (-j * via.transpose() * j) * phi;
  const PolarPath first(via, rng);
  const PolarPath second(rest, rng);

  Matrix k(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    for (int c = r; c < 2 * n; ++c) k(r, c) = k(c, r) = rng.uniform(-1.0, 1.0);
  }
  const Matrix loop_generator = 0.2 * j * k;

  SymplecticPath path;
  path.eval = [=](double t) -> Matrix {
    if (t == 0.0) return Matrix::Identity(2 * n, 2 * n);
    if (t == 1.0) return phi;
    return cayley(std::sin(std::numbers::pi * t) * loop_generator) * first(t) * second(t);
  };
  return path;
}

HalfInteger path_index_difference(const Matrix& phi, std::uint64_t seed, const MaslovOptions& opts) {
  const Eigen::Index m = phi.rows();
  if (rcond(phi - Matrix::Identity(m, m)) < 1e-12) {
    throw Error(ErrorCode::DegenerateEndpoint, "phi has eigenvalue 1");
  }
  const Matrix l = horizontal_frame(static_cast<int>(m / 2));
  std::string last;
  for (std::uint64_t attempt = 0; attempt < 6; ++attempt) {
    try {
      const SymplecticPath path = memoized(generate_path(phi, mix_seed(seed, attempt)));
      const HalfInteger cz = conley_zehnder(path, opts).index;
      const HalfInteger ml = lagrangian_maslov(path, l, opts).index;
      return cz - ml;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnresolvedCrossing) throw;
      last = e.what();
    }
  }
  throw Error(ErrorCode::UnresolvedCrossing, "no generic path found: " + last);
}

IndexResult hormander_via_paths(const Matrix& phi, std::uint64_t seed, const MaslovOptions& opts) {
  const HalfInteger first = path_index_difference(phi, seed, opts);
  const HalfInteger second = path_index_difference(phi, mix_seed(seed, 0x5eed), opts);
  if (first != second) {
    throw Error(ErrorCode::PathDependence, "two paths disagree: " + std::to_string(first.doubled) +
                                               "/2 vs " + std::to_string(second.doubled) + "/2");
  }
  IndexResult r;
  r.k = 1;
  r.s = first;
  r.method = IndexMethod::PathDifference;
  return r;
}

}  // namespace hormander
