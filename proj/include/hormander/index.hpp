#pragma once

#include <optional>
#include <string_view>

#include "hormander/darwin.hpp"
#include "hormander/linalg.hpp"

namespace hormander {

/// Exact element of (1/2)Z, stored as twice its value.
struct HalfInteger {
  int doubled = 0;

  static constexpr HalfInteger from_doubled(int d) { return HalfInteger{d}; }
  static constexpr HalfInteger from_int(int v) { return HalfInteger{2 * v}; }

  bool is_integer() const { return doubled % 2 == 0; }
  double to_double() const { return 0.5 * doubled; }

  HalfInteger operator+(HalfInteger o) const { return {doubled + o.doubled}; }
  HalfInteger operator-(HalfInteger o) const { return {doubled - o.doubled}; }
  HalfInteger operator-() const { return {-doubled}; }
  HalfInteger& operator+=(HalfInteger o) {
    doubled += o.doubled;
    return *this;
  }
  bool operator==(const HalfInteger&) const = default;
};

enum class IndexMethod { Formula, QuadraticForm, PathDifference };

std::string_view to_string(IndexMethod m);

struct IndexResult {
  int k = 1;
  HalfInteger s;
  Inertia inertia;  // of the form whose signature produced s
  IndexMethod method = IndexMethod::Formula;
};

/// Symmetrized (I - T_k(A)) U_{k-1}(A)^{-1} C^{-1}, i.e. (I - A_k) C_k^{-1} for
/// the blocks of Phi^k. Throws CSingular, IterateDegenerate (U_{k-1}(A)
/// singular) or AsymmetryTooLarge when ||M - M^T|| > 1e-7 ||M||, which only
/// happens for blocks without the reversible structure.
Matrix hormander_sign_matrix(const ReturnMapBlocks& blocks, int k);

/// s(x, k eta) = 1/2 sign((I - T_k(A)) U_{k-1}(A)^{-1} C^{-1}).
IndexResult hormander_index_formula(const ReturnMapBlocks& blocks, int k,
                                    std::optional<double> tol = std::nullopt);

/// The quadratic form Q(Delta, Gr(Phi); L x L) on Delta = R^{2n}, assembled
/// from a generic linear solve for the map Gamma: Delta -> Gr(Phi) whose
/// graph is L x L, with L = R^n x {0}. Works for any symplectic Phi with
/// Phi - I and C invertible; does not use the block identities.
/// Throws NotTransverse (Phi - I singular) or CSingular (L x L meets Gr(Phi)).
Matrix duistermaat_form(const Matrix& phi);

/// s(L x L, Delta; Delta, Gr(Phi)) = -1/2 sign Q(Delta, Gr(Phi); L x L).
/// Requires Q symmetric (QNotSymmetric otherwise) with kernel exactly
/// Delta cap (L x L), of dimension n (DegenerateForm otherwise).
IndexResult hormander_index_quadratic_form(const Matrix& phi,
                                           std::optional<double> tol = std::nullopt);

struct ClosedFormV {
  Vector v;      // ((A - I) C^{-1} u2, -u2)
  Vector phi_v;  // ((I - A) C^{-1} u2, -u2)
};

/// Closed-form solution of (u + v, u + Phi v) in L x L for reversible blocks.
ClosedFormV closed_form_v(const ReturnMapBlocks& blocks, const Vector& u2);

}  // namespace hormander
