#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hormander/index.hpp"
#include "hormander/linalg.hpp"

namespace hormander {

/// Full-rank 2m x m frame of a Lagrangian subspace of (R^{2m}, x^T S y).
struct LagrangianFrame {
  Matrix frame;

  /// Validates rank and isotropy (frame^T S frame = 0 to tol, after
  /// orthonormalization). Throws DimensionMismatch or NotSymplectic.
  static LagrangianFrame checked(Matrix frame, const Matrix& structure, double tol = 1e-10);
};

/// t in [0, 1] -> frame of a Lagrangian subspace. Frames only need to vary
/// continuously in span; they are orthonormalized internally.
struct LagrangianPath {
  std::function<Matrix(double)> frame;
  bool constant = false;

  static LagrangianPath fixed(Matrix frame);
  LagrangianPath reversed() const;
};

struct CrossingRecord {
  double t = 0;
  int intersection_dim = 0;
  Inertia form_inertia;
  HalfInteger contribution;  // signature, halved at t = 0 and t = 1
};

struct MaslovOptions {
  int grid = 256;                 // uniform samples of [0, 1]
  double locate_tol = 1e-12;      // bisection / golden-section interval width
  double min_separation = 1e-8;   // closer crossings count as unresolved
  double fd_step = 1e-5;          // crossing-form difference quotient step
  double richardson_tol = 1e-4;   // relative agreement of steps h and h/2
  double endpoint_tol = 1e-9;     // singular value counted as intersection at t = 0, 1
  double crossing_tol = 1e-7;     // singular value counted as intersection inside (0, 1)
  int max_refinements = 3;        // grid x4 on a failed parity check
};

struct MaslovResult {
  HalfInteger index;
  std::vector<CrossingRecord> crossings;
};

/// Robbin-Salamon index of the pair (path_a, path_b) in the symplectic space
/// with structure matrix `structure` (Omega(x, y) = x^T structure y): the sum
/// over crossings of the signature of the crossing form
/// Gamma(path_a, t) - Gamma(path_b, t) on the intersection, with half weight
/// at the endpoints. Throws UnresolvedCrossing for irregular crossings or
/// when the crossing set cannot be resolved.
MaslovResult maslov_index(const Matrix& structure, const LagrangianPath& path_a,
                          const LagrangianPath& path_b, const MaslovOptions& opts = {});

/// Structure matrix diag(-J, J) of (V x V, (-omega) x omega), V = R^{2n}.
Matrix product_structure(int n);

/// [[I], [psi]], the graph of psi in V x V. Throws NotSymplectic.
Matrix graph_frame(const Matrix& psi, double tol = 1e-8);

/// Frame [[I], [I]] of the diagonal of V x V.
Matrix diagonal_frame(int n);

/// Frame of L x L in V x V for a frame of L in V.
Matrix product_frame(const Matrix& l_frame);

/// Frame of L = R^n x {0} in R^{2n}.
Matrix horizontal_frame(int n);

/// t in [0, 1] -> symplectic matrix with psi(0) = I.
struct SymplecticPath {
  std::function<Matrix(double)> eval;
  int sample_count = 256;
};

/// mu(Gr(psi), Delta). DegenerateEndpoint if psi(1) - I is singular.
MaslovResult conley_zehnder(const SymplecticPath& path, const MaslovOptions& opts = {});

/// mu(Gr(psi), L x L).
MaslovResult lagrangian_maslov(const SymplecticPath& path, const Matrix& l_frame,
                               const MaslovOptions& opts = {});

/// A generic symplectic path from I to phi built from the polar factors of a
/// random intermediate point, with a random branch of the unitary logarithm
/// and a small Hamiltonian loop superimposed. Different seeds give genuinely
/// different paths, possibly in different homotopy classes.
SymplecticPath generate_path(const Matrix& phi, std::uint64_t seed);

/// mu_CZ - mu_L along a generated path, evaluated for two independent seeds
/// and required to agree (PathDependence otherwise). A seed whose path hits an
/// unresolvable crossing is replaced by a derived one.
IndexResult hormander_via_paths(const Matrix& phi, std::uint64_t seed,
                                const MaslovOptions& opts = {});

/// mu_CZ - mu_L for one generated path (with the same retry policy).
HalfInteger path_index_difference(const Matrix& phi, std::uint64_t seed,
                                  const MaslovOptions& opts = {});

}  // namespace hormander
