#pragma once

#include <functional>

#include "proxkit/function.hpp"
#include "proxkit/moreau.hpp"

namespace proxkit::detail {

// Eigen-decomposition of L L^* for an m x n matrix L.
struct GramSpectrum {
  Matrix u;    // orthonormal eigenvectors (columns)
  Vector lam;  // eigenvalues, ascending, clamped to >= 0

  static GramSpectrum of(const Matrix& l);
  // Orthonormal basis of eigenvectors whose eigenvalue satisfies pred.
  template <class Pred>
  Matrix basis_where(Pred pred) const {
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) k += pred(lam[i]) ? 1 : 0;
    Matrix b(u.rows(), k);
    k = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (pred(lam[i])) b.col(k++) = u.col(i);
    }
    return b;
  }
};

// sup_y <b, y> - g*(y) - <y, M y>/2 with M = a I - c L L^*, M PSD.
struct DualQuadratic {
  const ConvexFunction& g;
  const Matrix& l;
  const GramSpectrum& spectrum;
  double a;
  double c;
  Vector b;
};

SolveReport solve_dual_quadratic(const DualQuadratic& p, const Vector& y0, const SolverOpts& opts);

// sup_z <z, x> - h(z) for convex h with lipschitz-continuous gradient.
struct SmoothConjugate {
  // Returns h(z) and writes the gradient.
  std::function<double(const Vector& z, Vector& grad)> h;
  // Optional: an upper bound on the supremum built from z (or +inf).
  std::function<double(const Vector& z)> upper_bound;
  double lipschitz;
  Vector x;
};

SolveReport solve_smooth_conjugate(const SmoothConjugate& p, const Vector& z0, const SolverOpts& opts);

// inf of g over anchor + span(basis) (basis orthonormal, possibly empty or the
// identity), by Douglas-Rachford splitting with unit step.
struct AffineMin {
  double value;
  Vector point;
  SolveStatus status;
  int iterations;
};

AffineMin minimize_over_affine(const ConvexFunction& g, const Vector& anchor, const Matrix& basis,
                               const SolverOpts& opts);

// Minimize a smooth function with fixed step 1/lipschitz; residual is the step length.
struct SmoothMin {
  std::function<double(const Vector& x, Vector& grad)> f;
  double lipschitz;
};

SolveReport minimize_smooth(const SmoothMin& p, const Vector& x0, const SolverOpts& opts);

}  // namespace proxkit::detail
