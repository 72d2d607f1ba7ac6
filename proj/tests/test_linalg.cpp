#include <doctest.h>

#include "hormander/darwin.hpp"
#include "hormander/linalg.hpp"
#include "support.hpp"

using namespace hormander;
using namespace testing;

TEST_CASE("inertia of small diagonal matrices") {
  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK(inertia(d, 1e-9) == Inertia{1, 1, 0});
  CHECK(inertia(Matrix::Identity(3, 3), 1e-9) == Inertia{3, 0, 0});
  CHECK(inertia(Matrix::Zero(2, 2), 1e-9) == Inertia{0, 0, 2});
}

TEST_CASE("inertia matches characteristic polynomial sign changes") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m = random_symmetric(rng, 5);
    const Counts ref = inertia_by_sign_changes(m);
    const Inertia in = inertia(m);
    CHECK(in.n_pos == ref.pos);
    CHECK(in.n_neg == ref.neg);
    CHECK(in.n_zero == ref.zero);
  }
}

TEST_CASE("inertia counts a planted kernel") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix b = random_matrix(rng, 5, 3);
    Matrix s = Matrix::Zero(3, 3);
    s.diagonal() << 1.0, -2.0, 0.5;
    const Matrix m = b * s * b.transpose();  // rank 3, inertia (2, 1, 2)
    CHECK(inertia(m) == Inertia{2, 1, 2});
    const Counts ref = inertia_by_sign_changes(m, 1e-10L);
    CHECK(ref.zero == 2);
  }
}

TEST_CASE("inertia rejects bad input") {
  CHECK_THROWS_AS(inertia(Matrix::Zero(2, 3)), Error);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = nan(1, 0) = std::nan("");
  try {
    inertia(nan);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  try {
    inertia(asym, 1e-9);
    FAIL("expected AsymmetryTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetryTooLarge);
  }
}

TEST_CASE("Sylvester's law on random congruences") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = random_symmetric(rng, 4);
    const Matrix p = random_matrix(rng, 4, 4) + 2.0 * Matrix::Identity(4, 4);
    const Matrix c = p.transpose() * m * p;
    CHECK(inertia(c) == inertia(m));
  }
}

TEST_CASE("signature") {
  Matrix d(2, 2);
  d << 2, 0, 0, 3;
  CHECK(signature(d) == 2);
  d << 1, 0, 0, -1;
  CHECK(signature(d) == 0);
  d << 1, 0, 0, 0;
  try {
    signature(d);
    FAIL("expected DegenerateForm");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateForm);
  }
}

TEST_CASE("signature of (I - A) C^{-1} on the rotation family") {
  for (double theta : {0.3, 1.0, 2.0, 3.0, 4.0, 5.5}) {
    const double a = std::cos(theta), c = std::sin(theta);
    Matrix m(1, 1);
    m << (1 - a) / c;
    CHECK(signature(m) == rotation_index_doubled(theta, 1));
  }
}

TEST_CASE("symmetrized and exact signatures agree") {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = random_symmetric(rng, 6);
    CHECK(signature(m) == signature(0.5 * (m + m.transpose())));
  }
}

TEST_CASE("is_symplectic") {
  CHECK(is_symplectic(Matrix::Identity(4, 4), 1e-12));
  CHECK(is_symplectic(rotation(0.7), 1e-12));
  Matrix d(2, 2);
  d << 2, 0, 0, 1;
  CHECK_FALSE(is_symplectic(d, 1e-12));
  CHECK_THROWS_AS(is_symplectic(Matrix::Identity(3, 3), 1e-12), Error);
  CHECK(standard_j(2).isApprox(j_matrix(2)));
}

TEST_CASE("symplectic inverse") {
  const Blocks id{Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2),
                  Matrix::Identity(2, 2)};
  CHECK(symplectic_inverse(id).assemble().isApprox(Matrix::Identity(4, 4)));

  // Darwin form (a, b, c, a) with a^2 - bc = 1 inverts to (a, -b, -c, a).
  const double a = 1.5, b = 2.0, c = (a * a - 1) / b;
  Blocks m{Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c),
           Matrix::Constant(1, 1, a)};
  const Blocks inv = symplectic_inverse(m);
  CHECK(inv.a(0, 0) == doctest::Approx(a));
  CHECK(inv.b(0, 0) == doctest::Approx(-b));
  CHECK(inv.c(0, 0) == doctest::Approx(-c));
  CHECK(inv.d(0, 0) == doctest::Approx(a));

  Rng rng(15);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix w = random_symplectic(3, rng, 0.5);
    if (norm_inf(w) > 10) continue;
    ++tested;
    const Matrix inv_w = symplectic_inverse(Blocks::split(w)).assemble();
    const Matrix generic = w.fullPivLu().solve(Matrix::Identity(6, 6));
    CHECK(max_abs(inv_w - generic) <= 1e-9);
    CHECK(max_abs(inv_w * w - Matrix::Identity(6, 6)) <= 1e-9);
  }
  CHECK(tested > 100);

  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = 2;
  try {
    symplectic_inverse(Blocks::split(bad));
    FAIL("expected NotSymplectic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymplectic);
  }
}

TEST_CASE("orthonormalize keeps the span and is continuous") {
  Rng rng(16);
  const Matrix z = random_matrix(rng, 6, 3);
  const Matrix q = orthonormalize(z);
  CHECK(max_abs(q.transpose() * q - Matrix::Identity(3, 3)) < 1e-14);
  CHECK(max_abs(q * (q.transpose() * z) - z) < 1e-13);
  const Matrix q2 = orthonormalize(z + 1e-9 * random_matrix(rng, 6, 3));
  CHECK(max_abs(q2 - q) < 1e-7);
}

TEST_CASE("null space") {
  Matrix m(2, 4);
  m << 1, 0, 0, 0, 0, 1, 0, 0;
  const Matrix n = null_space(m);
  CHECK(n.cols() == 2);
  CHECK(max_abs(m * n) < 1e-14);
}
