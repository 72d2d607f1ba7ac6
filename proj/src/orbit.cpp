#include "hormander/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>
#include <boost/numeric/odeint.hpp>

#include "hormander/rng.hpp"

namespace hormander {

namespace odeint = boost::numeric::odeint;

Vector HamiltonianSystem::vector_field(const Vector& x) const {
  return standard_j(dim / 2) * gradient(x);
}

HamiltonianSystem HamiltonianSystem::oscillator(double omega1, double omega2) {
  if (!(omega1 > 0) || !(omega2 > 0) || !std::isfinite(omega1) || !std::isfinite(omega2)) {
    throw Error(ErrorCode::MalformedInput, "oscillator frequencies must be positive");
  }
  const double k1 = omega1 * omega1;
  const double k2 = omega2 * omega2;
  HamiltonianSystem s;
  s.name = "oscillator";
  s.dim = 4;
  s.hamiltonian = [=](const Vector& x) {
    return 0.5 * (x(2) * x(2) + x(3) * x(3)) + 0.5 * (k1 * x(0) * x(0) + k2 * x(1) * x(1));
  };
  s.gradient = [=](const Vector& x) {
    Vector g(4);
    g << k1 * x(0), k2 * x(1), x(2), x(3);
    return g;
  };
  s.hessian = [=](const Vector&) {
    Vector d(4);
    d << k1, k2, 1.0, 1.0;
    return Matrix(d.asDiagonal());
  };
  s.involution = Vector((Vector(4) << 1.0, -1.0, -1.0, 1.0).finished()).asDiagonal();
  return s;
}

HamiltonianSystem HamiltonianSystem::henon_heiles() {
  HamiltonianSystem s;
  s.name = "henon-heiles";
  s.dim = 4;
  s.hamiltonian = [](const Vector& x) {
    const double q1 = x(0), q2 = x(1);
    return 0.5 * (x(2) * x(2) + x(3) * x(3)) + 0.5 * (q1 * q1 + q2 * q2) + q1 * q1 * q2 -
           q2 * q2 * q2 / 3.0;
  };
  s.gradient = [](const Vector& x) {
    const double q1 = x(0), q2 = x(1);
    Vector g(4);
    g << q1 + 2.0 * q1 * q2, q2 + q1 * q1 - q2 * q2, x(2), x(3);
    return g;
  };
  s.hessian = [](const Vector& x) {
    const double q1 = x(0), q2 = x(1);
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 1.0 + 2.0 * q2;
    h(0, 1) = h(1, 0) = 2.0 * q1;
    h(1, 1) = 1.0 - 2.0 * q2;
    h(2, 2) = h(3, 3) = 1.0;
    return h;
  };
  s.involution = Vector((Vector(4) << -1.0, 1.0, 1.0, -1.0).finished()).asDiagonal();
  return s;
}

void validate_system(const HamiltonianSystem& sys, std::uint64_t seed, int samples, double tol) {
  if (sys.dim <= 0 || sys.dim % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "phase space dimension must be positive and even");
  }
  const Matrix& rho = sys.involution;
  if (rho.rows() != sys.dim || rho.cols() != sys.dim) {
    throw Error(ErrorCode::DimensionMismatch, "involution does not match the phase space");
  }
  const Matrix id = Matrix::Identity(sys.dim, sys.dim);
  const Matrix j = standard_j(sys.dim / 2);
  if (norm_inf(rho * rho - id) > tol) {
    throw Error(ErrorCode::MalformedInput, "involution does not square to the identity");
  }
  if (norm_inf(rho.transpose() * j * rho + j) > tol) {
    throw Error(ErrorCode::NotSymplectic, "involution is not antisymplectic");
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Vector x(sys.dim);
    for (int i = 0; i < sys.dim; ++i) x(i) = rng.uniform(-0.5, 0.5);
    const double h = sys.hamiltonian(x);
    if (std::abs(sys.hamiltonian(rho * x) - h) > tol * std::max(1.0, std::abs(h))) {
      throw Error(ErrorCode::MalformedInput, "Hamiltonian is not invariant under the involution");
    }
    const Vector field = sys.vector_field(x);
    if ((rho * sys.vector_field(rho * x) + field).lpNorm<Eigen::Infinity>() >
        tol * std::max(1.0, field.lpNorm<Eigen::Infinity>())) {
      throw Error(ErrorCode::MalformedInput, "vector field is not reversed by the involution");
    }
  }
}

VariationalFlow integrate_with_variations(const HamiltonianSystem& sys, const Vector& x0, double t,
                                          double tol) {
  const int d = sys.dim;
  if (x0.size() != d) throw Error(ErrorCode::DimensionMismatch, "initial point has wrong dimension");
  if (!(tol > 0)) throw Error(ErrorCode::MalformedInput, "integration tolerance must be positive");
  if (!x0.allFinite() || !std::isfinite(t)) {
    throw Error(ErrorCode::NonFinite, "non-finite initial data");
  }
  const Matrix j = standard_j(d / 2);
  const double h0 = sys.hamiltonian(x0);

  VariationalFlow out;
  out.trajectory.push_back({0.0, x0});
  if (t == 0.0) {
    out.x_end = x0;
    out.fundamental = Matrix::Identity(d, d);
    return out;
  }

  // State layout: x (d entries) followed by M in column-major order.
  using State = std::vector<double>;
  State state(static_cast<std::size_t>(d + d * d), 0.0);
  Eigen::Map<Vector>(state.data(), d) = x0;
  Eigen::Map<Matrix>(state.data() + d, d, d).setIdentity();

  auto rhs = [&](const State& s, State& ds, double) {
    const Eigen::Map<const Vector> x(s.data(), d);
    const Eigen::Map<const Matrix> m(s.data() + d, d, d);
    Eigen::Map<Vector>(ds.data(), d) = j * sys.gradient(x);
    Eigen::Map<Matrix>(ds.data() + d, d, d) = j * sys.hessian(x) * m;
  };

  constexpr std::size_t kMaxSteps = 1000000;
  auto observer = [&](const State& s, double time) {
    const Eigen::Map<const Vector> x(s.data(), d);
    if (!x.allFinite()) throw Error(ErrorCode::StepFailure, "state became non-finite");
    if (out.trajectory.size() > kMaxSteps) {
      throw Error(ErrorCode::StepFailure, "step budget exhausted");
    }
    if (time != 0.0) out.trajectory.push_back({time, Vector(x)});
    out.energy_drift = std::max(out.energy_drift, std::abs(sys.hamiltonian(x) - h0));
  };

  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  const double dt0 = std::copysign(std::min(0.01, std::abs(t)), t);
  try {
    odeint::integrate_adaptive(stepper, rhs, state, 0.0, t, dt0, observer);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::StepFailure, e.what());
  }

  out.x_end = Eigen::Map<Vector>(state.data(), d);
  out.fundamental = Eigen::Map<Matrix>(state.data() + d, d, d);
  if (!out.fundamental.allFinite()) throw Error(ErrorCode::StepFailure, "non-finite variations");
  out.symplectic_residual = symplectic_residual(out.fundamental);
  if (out.energy_drift > 10.0 * tol * std::max(1.0, std::abs(h0))) {
    throw Error(ErrorCode::EnergyDriftExceeded,
                "energy drift " + format_real(out.energy_drift) + " at tolerance " +
                    format_real(tol));
  }
  return out;
}

namespace {

Matrix eigenspace(const Matrix& rho, double sign) {
  const Eigen::Index m = rho.rows();
  return null_space(rho - sign * Matrix::Identity(m, m), 1e-9);
}

double fixed_set_defect(const Matrix& rho, const Vector& x) {
  return (rho * x - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

SymmetricOrbit find_symmetric_orbit(const HamiltonianSystem& sys, const Vector& seed_point,
                                    double half_period_guess, double tol,
                                    const OrbitSearchOptions& opts) {
  if (seed_point.size() != sys.dim) {
    throw Error(ErrorCode::DimensionMismatch, "seed point has wrong dimension");
  }
  if (!(tol > 0) || !(half_period_guess > 0)) {
    throw Error(ErrorCode::MalformedInput, "tolerance and half period must be positive");
  }
  const Matrix& rho = sys.involution;
  const double scale = std::max(1.0, seed_point.lpNorm<Eigen::Infinity>());
  if (fixed_set_defect(rho, seed_point) > 1e-12 * scale) {
    throw Error(ErrorCode::NotOnFixedSet, "seed point is not fixed by the involution");
  }
  if (sys.gradient(seed_point).lpNorm<Eigen::Infinity>() < 1e-12) {
    throw Error(ErrorCode::CriticalPoint, "gradient of H vanishes at the seed point");
  }

  const Matrix e_plus = eigenspace(rho, 1.0);
  const Matrix e_minus = eigenspace(rho, -1.0);
  const Eigen::Index m = e_plus.cols();
  const double energy = sys.hamiltonian(seed_point);
  const double itol = std::clamp(1e-2 * tol, 1e-14, opts.integration_tol);

  // Unknowns u = (c, tau) with x = E+ c.
  Vector u(m + 1);
  u.head(m) = e_plus.transpose() * seed_point;
  u(m) = half_period_guess;

  auto residual = [&](const Vector& uu, VariationalFlow* flow) {
    const Vector x = e_plus * uu.head(m);
    VariationalFlow f = integrate_with_variations(sys, x, uu(m), itol);
    Vector r(m + 1);
    r.head(m) = e_minus.transpose() * f.x_end;
    r(m) = sys.hamiltonian(x) - energy;
    if (flow) *flow = std::move(f);
    return r;
  };

  VariationalFlow flow;
  Vector r = residual(u, &flow);
  int it = 0;
  for (; r.norm() > 0.1 * tol; ++it) {
    if (it >= opts.max_iterations) {
      throw Error(ErrorCode::NoConvergence,
                  "shooting residual " + format_real(r.norm()) + " after " +
                      std::to_string(it) + " iterations");
    }
    const Vector x = e_plus * u.head(m);
    Matrix jac(m + 1, m + 1);
    jac.topLeftCorner(m, m) = e_minus.transpose() * flow.fundamental * e_plus;
    jac.topRightCorner(m, 1) = e_minus.transpose() * sys.vector_field(flow.x_end);
    jac.bottomLeftCorner(1, m) = sys.gradient(x).transpose() * e_plus;
    jac(m, m) = 0.0;
    const Vector step = jac.completeOrthogonalDecomposition().solve(-r);

    // Backtracking on the residual norm.
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, lambda *= 0.5) {
      Vector trial = u + lambda * step;
      if (!(trial(m) > 0)) continue;
      VariationalFlow trial_flow;
      Vector trial_r;
      try {
        trial_r = residual(trial, &trial_flow);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StepFailure && e.code() != ErrorCode::EnergyDriftExceeded) throw;
        continue;
      }
      if (trial_r.norm() < r.norm() || trial_r.norm() <= 0.1 * tol) {
        u = std::move(trial);
        r = std::move(trial_r);
        flow = std::move(trial_flow);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::NoConvergence,
                  "line search failed at residual " + format_real(r.norm()));
    }
  }

  SymmetricOrbit orbit;
  orbit.x = e_plus * u.head(m);
  orbit.eta = 2.0 * u(m);
  orbit.energy = sys.hamiltonian(orbit.x);
  orbit.iterations = it;
  if (sys.gradient(orbit.x).lpNorm<Eigen::Infinity>() < 1e-12) {
    throw Error(ErrorCode::CriticalPoint, "shooting converged to an equilibrium");
  }
  const VariationalFlow full = integrate_with_variations(sys, orbit.x, orbit.eta, itol);
  orbit.residual = (full.x_end - orbit.x).norm();
  if (orbit.residual > tol) {
    throw Error(ErrorCode::NoConvergence,
                "full-period closure residual " + format_real(orbit.residual));
  }
  return orbit;
}

TransverseSection build_transverse_section(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                                           std::uint64_t seed, const std::optional<Vector>& w) {
  const Matrix& rho = sys.involution;
  const Vector grad = sys.gradient(orbit.x);
  const double gnorm = grad.norm();
  if (gnorm < 1e-12) throw Error(ErrorCode::CriticalPoint, "gradient of H vanishes on the orbit");
  const Matrix j = standard_j(sys.dim / 2);
  const Vector field = j * grad;

  TransverseSection sec;
  Rng rng(seed);
  for (int attempt = 1;; ++attempt) {
    Vector sample(sys.dim);
    if (w && attempt == 1) {
      sample = *w;
    } else {
      for (int i = 0; i < sys.dim; ++i) sample(i) = rng.uniform(-1.0, 1.0);
    }
    Vector v = sample + rho * sample;
    const double vn = v.norm();
    if (vn > 0) {
      v /= vn;
      if (std::abs(grad.dot(v)) > 1e-6 * gnorm) {
        sec.v_aux = v;
        sec.attempts = attempt;
        break;
      }
    }
    if (w || attempt == 100) {
      throw Error(ErrorCode::DegenerateTransversal, "dH(x) v vanishes for the sampled w");
    }
  }

  // V = {y : omega(v, y) = omega(X_H, y) = 0}.
  Matrix constraints(2, sys.dim);
  constraints.row(0) = sec.v_aux.transpose() * j;
  constraints.row(1) = field.transpose() * j / field.norm();
  const Matrix basis_v = null_space(constraints, 1e-10);
  const Eigen::Index n = basis_v.cols() / 2;
  if (basis_v.cols() != sys.dim - 2) {
    throw Error(ErrorCode::DegenerateTransversal, "v and X_H are not independent");
  }

  // rho preserves V, so it acts on the orthonormal basis by N^T rho N.
  const Matrix r_v = basis_v.transpose() * rho * basis_v;
  const Matrix plus = basis_v * eigenspace(r_v, 1.0);
  const Matrix minus = basis_v * eigenspace(r_v, -1.0);
  if (plus.cols() != n || minus.cols() != n) {
    throw Error(ErrorCode::UnequalEigenspaces,
                "rho on V has eigenspaces of dimensions " + std::to_string(plus.cols()) + " and " +
                    std::to_string(minus.cols()));
  }

  sec.basis_plus = orthonormalize(plus);
  const Matrix f0 = orthonormalize(minus);
  const Matrix g = sec.basis_plus.transpose() * j * f0;
  if (rcond(g) < 1e-10) {
    throw Error(ErrorCode::ProjectionIllConditioned, "L+ and L- are not omega-dual");
  }
  sec.basis_minus = g.transpose().partialPivLu().solve(f0.transpose()).transpose();
  sec.symplectic_basis_matrix.resize(sys.dim, 2 * n);
  sec.symplectic_basis_matrix << sec.basis_plus, sec.basis_minus;
  return sec;
}

double SectionReport::max_residual() const {
  return std::max({pairing, isotropy, eigen, orthogonality});
}

SectionReport check_section(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                            const TransverseSection& section) {
  const Matrix j = standard_j(sys.dim / 2);
  const Matrix& e = section.basis_plus;
  const Matrix& f = section.basis_minus;
  const Eigen::Index n = e.cols();
  SectionReport rep;
  rep.pairing = norm_inf(e.transpose() * j * f - Matrix::Identity(n, n));
  rep.isotropy = std::max(norm_inf(e.transpose() * j * e), norm_inf(f.transpose() * j * f));
  rep.eigen = std::max(norm_inf(sys.involution * e - e), norm_inf(sys.involution * f + f));
  Matrix aux(sys.dim, 2);
  aux.col(0) = section.v_aux;
  aux.col(1) = sys.vector_field(orbit.x).normalized();
  rep.orthogonality = norm_inf(aux.transpose() * j * section.symplectic_basis_matrix);
  return rep;
}

ReducedMonodromy reduced_monodromy(const HamiltonianSystem& sys, const SymmetricOrbit& orbit,
                                   const TransverseSection& section, double integration_tol) {
  const Matrix j = standard_j(sys.dim / 2);
  const Matrix& s = section.symplectic_basis_matrix;
  const Eigen::Index n = section.basis_plus.cols();
  if (rcond(s.transpose() * s) < 1e-12) {
    throw Error(ErrorCode::ProjectionIllConditioned, "section basis is numerically dependent");
  }

  // Coordinates of y in V: a = -F^T J y, b = E^T J y. K vanishes on v and
  // X_H, so K M S is the projection along span{v, X_H} of M restricted to V.
  Matrix k(2 * n, sys.dim);
  k.topRows(n) = -section.basis_minus.transpose() * j;
  k.bottomRows(n) = section.basis_plus.transpose() * j;

  const VariationalFlow flow = integrate_with_variations(sys, orbit.x, orbit.eta, integration_tol);
  ReducedMonodromy out;
  out.full_monodromy = flow.fundamental;
  const Matrix phi = k * flow.fundamental * s;
  out.blocks = Blocks::split(phi);
  out.involution_in_basis = k * sys.involution * s;
  const Matrix& rho = sys.involution;
  const Matrix m_inv = -j * flow.fundamental.transpose() * j;
  out.reversibility = norm_inf(flow.fundamental - rho * m_inv * rho);

  const DarwinReport rep = validate_darwin(out.blocks, 1e-6);
  if (!rep.ok) {
    throw Error(ErrorCode::InvalidBlocks, std::string("reduced return map violates ") +
                                              rep.first_failure() + " (residual " +
                                              format_real(rep.max_residual()) + ")");
  }
  return out;
}

}  // namespace hormander
