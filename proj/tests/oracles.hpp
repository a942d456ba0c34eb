#pragma once

// Independent brute-force and closed-form references used by the tests.
// Nothing here calls into the library's solvers or grid kernels.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Eigenvalues of a symmetric 2x2 matrix by the characteristic polynomial.
inline std::pair<double, double> sym2_eigs(const Mat& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

// Dense 1-D scan of [lo, hi] with the given step, then a golden-section polish
// (the scanned functions are convex). Returns (min value, argmin).
inline std::pair<double, double> min1d(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = std::numeric_limits<double>::infinity();
  double arg = lo;
  const long n = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 0; i <= n; ++i) {
    const double t = lo + step * static_cast<double>(i);
    const double v = f(t);
    if (v < best) {
      best = v;
      arg = t;
    }
  }
  double a = std::max(lo, arg - step), b = std::min(hi, arg + step);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) <= f(d)) b = d; else a = c;
  }
  const double polished = 0.5 * (a + b);
  const double pv = f(polished);
  if (pv < best) return {pv, polished};
  return {best, arg};
}

// Plain scan without polishing: (min value, argmin) at multiples of step.
inline std::pair<double, double> scan1d(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = std::numeric_limits<double>::infinity();
  double arg = lo;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long i = 0; i <= n; ++i) {
    const double t = lo + step * static_cast<double>(i);
    const double v = f(t);
    if (v < best) {
      best = v;
      arg = t;
    }
  }
  return {best, arg};
}

inline Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

// Largest singular value through the full SVD (reference for power iteration).
inline double spectral_norm(const Mat& m) { return Eigen::JacobiSVD<Mat>(m).singularValues()(0); }

}  // namespace oracle
