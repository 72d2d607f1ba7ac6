#include "hormander/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace hormander {

LagrangianFrame LagrangianFrame::checked(Matrix frame, const Matrix& structure, double tol) {
  if (frame.rows() != structure.rows() || frame.rows() != 2 * frame.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "a Lagrangian frame must be 2m x m");
  }
  Eigen::FullPivLU<Matrix> lu(frame);
  if (lu.rank() != frame.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Lagrangian frame is rank deficient");
  }
  const Matrix f = orthonormalize(frame);
  const double iso = norm_inf(f.transpose() * structure * f);
  if (iso > tol) {
    throw Error(ErrorCode::NotSymplectic, "frame is not isotropic (residual " + format_real(iso) + ")");
  }
  return LagrangianFrame{std::move(frame)};
}

LagrangianPath LagrangianPath::fixed(Matrix frame) {
  return LagrangianPath{[f = std::move(frame)](double) { return f; }, true};
}

LagrangianPath LagrangianPath::reversed() const {
  return LagrangianPath{[f = frame](double t) { return f(1.0 - t); }, constant};
}

Matrix product_structure(int n) {
  const Matrix j = standard_j(n);
  Matrix s = Matrix::Zero(4 * n, 4 * n);
  s.topLeftCorner(2 * n, 2 * n) = -j;
  s.bottomRightCorner(2 * n, 2 * n) = j;
  return s;
}

Matrix graph_frame(const Matrix& psi, double tol) {
  const double res = symplectic_residual(psi);
  const double scale = std::max(1.0, norm_inf(psi));
  if (res > tol * scale * scale) {
    throw Error(ErrorCode::NotSymplectic, "graph of a non-symplectic map (residual " +
                                              format_real(res) + ")");
  }
  const Eigen::Index m = psi.rows();
  Matrix z(2 * m, m);
  z.topRows(m).setIdentity();
  z.bottomRows(m) = psi;
  return z;
}

Matrix diagonal_frame(int n) {
  Matrix z(4 * n, 2 * n);
  z.topRows(2 * n).setIdentity();
  z.bottomRows(2 * n).setIdentity();
  return z;
}

Matrix product_frame(const Matrix& l_frame) {
  const Eigen::Index r = l_frame.rows();
  const Eigen::Index c = l_frame.cols();
  Matrix z = Matrix::Zero(2 * r, 2 * c);
  z.topLeftCorner(r, c) = l_frame;
  z.bottomRightCorner(r, c) = l_frame;
  return z;
}

Matrix horizontal_frame(int n) {
  Matrix z = Matrix::Zero(2 * n, n);
  z.topRows(n).setIdentity();
  return z;
}

namespace {

double smallest_abs_eigenvalue(const Matrix& g) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()),
                                                 Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().minCoeff();
}

struct Probe {
  Matrix fa;
  Matrix fb;
  Matrix pairing;  // fb^T S fa; singular exactly at crossings
};

class CrossingEngine {
 public:
  CrossingEngine(const Matrix& structure, const LagrangianPath& a, const LagrangianPath& b,
                 const MaslovOptions& opts)
      : s_(structure), a_(a), b_(b), opts_(opts) {
    if (b_.constant) fb_const_ = orthonormalize(b_.frame(0.0));
  }

  MaslovResult run() {
    std::string last_failure;
    int grid = opts_.grid;
    for (int attempt = 0; attempt <= opts_.max_refinements; ++attempt, grid *= 4) {
      try {
        return scan(grid);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnresolvedCrossing) throw;
        last_failure = e.what();
      }
    }
    throw Error(ErrorCode::UnresolvedCrossing, last_failure);
  }

 private:
  Matrix frame_a(double t) const { return orthonormalize(a_.frame(t)); }
  Matrix frame_b(double t) const {
    return b_.constant ? fb_const_ : orthonormalize(b_.frame(t));
  }

  Probe probe(double t) const {
    Probe p;
    p.fa = frame_a(t);
    p.fb = frame_b(t);
    p.pairing = p.fb.transpose() * s_ * p.fa;
    return p;
  }

  double det_at(double t) const { return probe(t).pairing.determinant(); }

  double sigma_min(double t) const {
    Eigen::JacobiSVD<Matrix> svd(probe(t).pairing);
    return svd.singularValues()(svd.singularValues().size() - 1);
  }

  std::vector<double> build_grid(int n) const {
    std::vector<double> ts;
    ts.reserve(n + 12);
    for (int i = 0; i <= n; ++i) ts.push_back(static_cast<double>(i) / n);
    // Extra resolution next to the endpoints, where crossings of the
    // starting point sit.
    for (double e : {1e-6, 1e-5, 1e-4, 1e-3}) {
      if (e < 1.0 / n) {
        ts.push_back(e);
        ts.push_back(1.0 - e);
      }
    }
    std::sort(ts.begin(), ts.end());
    return ts;
  }

  double bisect(double lo, double hi, double det_lo) const {
    while (hi - lo > opts_.locate_tol) {
      const double mid = 0.5 * (lo + hi);
      const double dm = det_at(mid);
      if (dm == 0.0) return mid;
      if ((dm > 0) == (det_lo > 0)) {
        lo = mid;
        det_lo = dm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  double golden_min(double lo, double hi) const {
    constexpr double kInv = 0.6180339887498949;
    double x1 = hi - kInv * (hi - lo);
    double x2 = lo + kInv * (hi - lo);
    double f1 = sigma_min(x1);
    double f2 = sigma_min(x2);
    while (hi - lo > opts_.locate_tol) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInv * (hi - lo);
        f1 = sigma_min(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInv * (hi - lo);
        f2 = sigma_min(x2);
      }
    }
    return 0.5 * (lo + hi);
  }

  Matrix derivative(bool of_a, double t, double h) const {
    auto f = [&](double x) { return of_a ? frame_a(x) : frame_b(x); };
    if (t - h >= 0.0 && t + h <= 1.0) return (f(t + h) - f(t - h)) / (2.0 * h);
    if (t - h < 0.0) return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    return (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h);
  }

  // Gamma(a, t) - Gamma(b, t) on the intersection spanned by fa * kernel.
  std::pair<Matrix, double> crossing_form(const Probe& p, const Matrix& kernel, double t,
                                          double h) const {
    auto sym = [](const Matrix& m) { return Matrix(0.5 * (m + m.transpose())); };
    const Matrix sa = sym(p.fa.transpose() * s_ * derivative(true, t, h));
    Matrix g = kernel.transpose() * sa * kernel;
    double scale = norm_inf(sa);
    if (!b_.constant) {
      const Matrix kb = p.fb.transpose() * p.fa * kernel;
      const Matrix sb = sym(p.fb.transpose() * s_ * derivative(false, t, h));
      g -= kb.transpose() * sb * kb;
      scale += norm_inf(sb);
    }
    return {g, scale};
  }

  // Returns nullopt when t is not a crossing at the given threshold.
  std::optional<CrossingRecord> evaluate_crossing(double t, double zero_tol, bool endpoint) const {
    const Probe p = probe(t);
    Eigen::JacobiSVD<Matrix> svd(p.pairing, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    int dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) < zero_tol) ++dim;
    }
    if (dim == 0) return std::nullopt;
    const Matrix kernel = svd.matrixV().rightCols(dim);

    // Steps h and h/2 must agree; strongly curved paths get up to three
    // further halvings. When rounding noise in the frames keeps the relative
    // agreement out of reach, the closest pair still fixes the inertia if
    // the discrepancy is well below the smallest eigenvalue (Weyl).
    double h = opts_.fd_step;
    auto [g_coarse, scale] = crossing_form(p, kernel, t, h);
    Matrix g_fine;
    Matrix best;
    double best_margin = -1.0;
    for (int halving = 0;; ++halving) {
      g_fine = crossing_form(p, kernel, t, 0.5 * h).first;
      const double diff = norm_inf(g_coarse - g_fine);
      if (diff <= opts_.richardson_tol * norm_inf(g_fine) + 1e-12 * scale) break;
      const double margin = smallest_abs_eigenvalue(g_fine) - 4.0 * diff;
      if (margin > best_margin) {
        best_margin = margin;
        best = g_fine;
      }
      if (halving == 3) {
        if (best_margin <= 0.0) {
          throw Error(ErrorCode::UnresolvedCrossing,
                      "difference quotient of the crossing form is unstable at t = " +
                          format_real(t));
        }
        g_fine = best;
        break;
      }
      h *= 0.5;
      g_coarse = g_fine;
    }
    CrossingRecord rec;
    rec.t = t;
    rec.intersection_dim = dim;
    rec.form_inertia = inertia(g_fine, std::max(1e-6 * scale, 1e-300));
    if (rec.form_inertia.n_zero > 0) {
      throw Error(ErrorCode::UnresolvedCrossing,
                  "irregular crossing at t = " + format_real(t) + " (degenerate crossing form)");
    }
    const int sig = rec.form_inertia.signature();
    rec.contribution = HalfInteger::from_doubled(endpoint ? sig : 2 * sig);
    return rec;
  }

  MaslovResult scan(int grid) const {
    const std::vector<double> ts = build_grid(grid);
    const std::size_t last = ts.size() - 1;

    std::vector<CrossingRecord> crossings;
    const auto start = evaluate_crossing(0.0, opts_.endpoint_tol, true);
    const auto end = evaluate_crossing(1.0, opts_.endpoint_tol, true);

    std::vector<double> det(ts.size());
    for (std::size_t i = 0; i <= last; ++i) det[i] = det_at(ts[i]);

    const std::size_t i0 = start ? 1 : 0;
    const std::size_t i1 = end ? last - 1 : last;

    std::vector<double> located;
    auto known = [&](double t) {
      if (start && t < opts_.min_separation) return true;
      if (end && t > 1.0 - opts_.min_separation) return true;
      return std::any_of(located.begin(), located.end(),
                         [&](double s) { return std::abs(s - t) < opts_.min_separation; });
    };

    // Odd-dimensional crossings: sign changes of det(pairing).
    for (std::size_t i = i0; i < i1; ++i) {
      if (det[i] == 0.0 || det[i + 1] == 0.0 || (det[i] > 0) == (det[i + 1] > 0)) continue;
      const double t = bisect(ts[i], ts[i + 1], det[i]);
      if (known(t)) continue;
      const auto rec = evaluate_crossing(t, opts_.crossing_tol, false);
      if (!rec) {
        throw Error(ErrorCode::UnresolvedCrossing,
                    "sign change without a resolvable intersection near t = " + format_real(t));
      }
      located.push_back(t);
      crossings.push_back(*rec);
    }

    // With noisy frames the dip minimum can land a little off a crossing
    // already found by bisection; it is the same crossing when the pairing
    // stays singular in between.
    auto same_as_located = [&](double t, double lo, double hi) {
      return std::any_of(located.begin(), located.end(), [&](double s) {
        return s >= lo && s <= hi && sigma_min(0.5 * (s + t)) < opts_.crossing_tol;
      });
    };

    // Remaining crossings show up as dips of |det| that need not change sign.
    for (std::size_t i = i0 + 1; i + 1 <= i1; ++i) {
      const double here = std::abs(det[i]);
      if (!(here < std::abs(det[i - 1]) && here <= std::abs(det[i + 1]))) continue;
      const double t = golden_min(ts[i - 1], ts[i + 1]);
      if (known(t) || same_as_located(t, ts[i - 1], ts[i + 1])) continue;
      const auto rec = evaluate_crossing(t, opts_.crossing_tol, false);
      if (!rec) continue;
      located.push_back(t);
      crossings.push_back(*rec);
    }

    // Every interior crossing of odd dimension flips the sign of det.
    int odd = 0;
    for (const auto& c : crossings) odd += c.intersection_dim % 2;
    const bool flips = (det[i0] > 0) != (det[i1] > 0);
    if ((odd % 2 == 1) != flips) {
      throw Error(ErrorCode::UnresolvedCrossing,
                  "crossing parity mismatch on a grid of " + std::to_string(grid));
    }

    if (start) crossings.push_back(*start);
    if (end) crossings.push_back(*end);
    std::sort(crossings.begin(), crossings.end(),
              [](const CrossingRecord& x, const CrossingRecord& y) { return x.t < y.t; });
    for (std::size_t i = 1; i < crossings.size(); ++i) {
      if (crossings[i].t - crossings[i - 1].t < opts_.min_separation) {
        throw Error(ErrorCode::UnresolvedCrossing, "crossings closer than the separation limit");
      }
    }

    MaslovResult out;
    for (const auto& c : crossings) out.index += c.contribution;
    out.crossings = std::move(crossings);
    return out;
  }

  const Matrix& s_;
  const LagrangianPath& a_;
  const LagrangianPath& b_;
  MaslovOptions opts_;
  Matrix fb_const_;
};

}  // namespace

MaslovResult maslov_index(const Matrix& structure, const LagrangianPath& path_a,
                          const LagrangianPath& path_b, const MaslovOptions& opts) {
  require_square(structure, "structure matrix");
  return CrossingEngine(structure, path_a, path_b, opts).run();
}

namespace {

LagrangianPath graph_path(const SymplecticPath& path) {
  return LagrangianPath{[eval = path.eval](double t) {
                          const Matrix psi = eval(t);
                          const Eigen::Index m = psi.rows();
                          Matrix z(2 * m, m);
                          z.topRows(m).setIdentity();
                          z.bottomRows(m) = psi;
                          return z;
                        },
                        false};
}

MaslovOptions with_grid(const SymplecticPath& path, MaslovOptions opts) {
  opts.grid = std::max(opts.grid, path.sample_count);
  return opts;
}

}  // namespace

MaslovResult conley_zehnder(const SymplecticPath& path, const MaslovOptions& opts) {
  const Matrix start = path.eval(0.0);
  const Matrix end = path.eval(1.0);
  const Eigen::Index m = end.rows();
  if (norm_inf(start - Matrix::Identity(m, m)) > 1e-10) {
    throw Error(ErrorCode::DimensionMismatch, "symplectic path must start at the identity");
  }
  graph_frame(end);
  const double smin = (end - Matrix::Identity(m, m)).jacobiSvd().singularValues().minCoeff();
  if (!(smin > 1e-12 * std::max(1.0, norm_inf(end)))) {
    throw Error(ErrorCode::DegenerateEndpoint, "psi(1) has eigenvalue 1");
  }
  const int n = static_cast<int>(m / 2);
  return maslov_index(product_structure(n), graph_path(path),
                      LagrangianPath::fixed(diagonal_frame(n)), with_grid(path, opts));
}

MaslovResult lagrangian_maslov(const SymplecticPath& path, const Matrix& l_frame,
                               const MaslovOptions& opts) {
  const Matrix end = path.eval(1.0);
  const int n = static_cast<int>(end.rows() / 2);
  graph_frame(end);
  LagrangianFrame::checked(l_frame, standard_j(n));
  return maslov_index(product_structure(n), graph_path(path),
                      LagrangianPath::fixed(product_frame(l_frame)), with_grid(path, opts));
}

}  // namespace hormander
