#include <doctest.h>

#include <numbers>

#include "hormander/chebyshev.hpp"
#include "hormander/darwin.hpp"
#include "support.hpp"

using namespace hormander;
using namespace testing;

namespace {

Blocks rotation_blocks(double theta) { return Blocks::split(rotation(theta)); }

}  // namespace

TEST_CASE("validate_darwin on simple inputs") {
  const Blocks id = Blocks::split(Matrix::Identity(4, 4));
  const DarwinReport rep = validate_darwin(id, 1e-12);
  CHECK(rep.ok);
  CHECK(rep.max_residual() == 0.0);

  const double a = 0.3, b = -2.0, c = (a * a - 1) / b;
  Blocks m{Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c),
           Matrix::Constant(1, 1, a)};
  CHECK(validate_darwin(m, 1e-12).ok);

  m.d(0, 0) = 0.4;
  const DarwinReport bad = validate_darwin(m, 1e-8);
  CHECK_FALSE(bad.ok);
  CHECK(bad.d_transpose == doctest::Approx(0.1));
  CHECK(std::string(bad.first_failure()) == "D = A^T");

  Blocks mismatched{Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Zero(1, 1),
                    Matrix::Identity(2, 2)};
  CHECK_THROWS_AS(validate_darwin(mismatched, 1e-8), Error);
}

TEST_CASE("random return maps have the block structure") {
  for (int n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Blocks b = random_return_map(n, seed, 0.5);
      const DarwinReport rep = validate_darwin(b, 1e-8);
      CHECK(rep.ok);
      // Independent checks: D = A^T, A^2 - BC = I, CA symmetric, Phi = R Phi^{-1} R.
      const Matrix phi = b.assemble();
      Matrix r = Matrix::Identity(2 * n, 2 * n);
      r.bottomRightCorner(n, n) *= -1;
      CHECK(max_abs(b.d - b.a.transpose()) <= 1e-8);
      CHECK(max_abs(b.a * b.a - b.b * b.c - Matrix::Identity(n, n)) <= 1e-8);
      CHECK(max_abs(phi - r * phi.inverse() * r) <= 1e-8 * std::max(1.0, max_abs(phi)));
      CHECK(max_abs(b.c * b.a - (b.c * b.a).transpose()) <= 1e-8);
      if (n == 1) CHECK(std::abs(b.a(0, 0) * b.a(0, 0) - b.b(0, 0) * b.c(0, 0) - 1) <= 1e-10);
    }
  }
}

TEST_CASE("AC need not equal CA^T") {
  // For n >= 2 the symplectic relations give A^T C = CA; AC = CA^T fails in general.
  int asymmetric = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Blocks b = random_return_map(2, seed, 0.5);
    CHECK(max_abs(b.a.transpose() * b.c - b.c * b.a) <= 1e-8);
    if (max_abs(b.a * b.c - b.c * b.a.transpose()) > 1e-3) ++asymmetric;
  }
  CHECK(asymmetric > 10);
}

TEST_CASE("return map of the identity is the identity") {
  const Blocks b = return_map_from(Matrix::Identity(6, 6));
  CHECK(b.assemble().isApprox(Matrix::Identity(6, 6)));
}

TEST_CASE("generation is deterministic in the seed") {
  const Blocks x = random_return_map(3, 77, 0.5);
  const Blocks y = random_return_map(3, 77, 0.5);
  const Blocks z = random_return_map(3, 78, 0.5);
  CHECK(x.assemble() == y.assemble());
  CHECK(x.assemble() != z.assemble());
}

TEST_CASE("nondegeneracy of rotation blocks") {
  const NondegeneracyReport r3 = nondegeneracy_check(rotation_blocks(std::numbers::pi / 3), 3);
  for (int k = 1; k <= 3; ++k) {
    CHECK(r3.nondegenerate[k - 1]);
    CHECK(r3.det_values[k - 1] == doctest::Approx(2 - 2 * std::cos(k * std::numbers::pi / 3)));
  }
  CHECK(r3.ok);
  CHECK(r3.c_invertible);

  const NondegeneracyReport r4 = nondegeneracy_check(rotation_blocks(std::numbers::pi / 2), 4);
  CHECK(r4.nondegenerate[0]);
  CHECK(r4.nondegenerate[1]);
  CHECK(r4.nondegenerate[2]);
  CHECK_FALSE(r4.nondegenerate[3]);
  CHECK_FALSE(r4.ok);

  const NondegeneracyReport id = nondegeneracy_check(Blocks::split(Matrix::Identity(2, 2)), 5);
  for (bool nd : id.nondegenerate) CHECK_FALSE(nd);
}

TEST_CASE("determinant identities of the block structure") {
  // det(Phi - I) = 2^n det(I - A), det(Phi + I) = 2^n det(I + A),
  // det(Phi^2 - I) = (-4)^n det B det C.
  for (int n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Blocks b = random_return_map(n, seed, 0.5);
      const Matrix phi = b.assemble();
      const Matrix id2 = Matrix::Identity(2 * n, 2 * n);
      const Matrix id = Matrix::Identity(n, n);
      const double p = std::pow(2.0, n);
      const double scale = std::pow(std::max(1.0, max_abs(phi)), 2 * n);
      CHECK(std::abs((phi - id2).determinant() - p * (id - b.a).determinant()) <= 1e-9 * scale);
      CHECK(std::abs((phi + id2).determinant() - p * (id + b.a).determinant()) <= 1e-9 * scale);
      const double lhs = (phi * phi - id2).determinant();
      const double rhs = std::pow(-4.0, n) * b.b.determinant() * b.c.determinant();
      CHECK(std::abs(lhs - rhs) <= 1e-9 * scale * scale);
    }
  }
}

TEST_CASE("C is invertible whenever k = 1 and k = 2 are nondegenerate") {
  int checked = 0, violations = 0;
  for (int n = 1; n <= 4; ++n) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const NondegeneracyReport r = nondegeneracy_check(random_return_map(n, seed, 0.5), 2);
      if (!r.nondegenerate[0] || !r.nondegenerate[1]) continue;
      ++checked;
      if (!r.c_invertible || r.inconsistent) ++violations;
    }
  }
  CHECK(checked >= 1000);
  CHECK(violations == 0);
}

TEST_CASE("an explicit threshold overrides the defaults") {
  const NondegeneracyReport r = nondegeneracy_check(rotation_blocks(0.1), 2, 1.0);
  // det(Phi - I) = 2 - 2 cos 0.1 < 1.
  CHECK_FALSE(r.nondegenerate[0]);
  CHECK(r.thresholds[0] == 1.0);
}
