#include "proxkit/linalg.hpp"

#include <cmath>
#include <string>

namespace proxkit {

Vector make_vector(std::initializer_list<double> entries) {
  Vector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v[i++] = e;
  require_finite(v, "make_vector");
  return v;
}

void require_finite(const Vector& v, const char* what) {
  if (v.size() == 0) throw DimensionError(std::string(what) + ": empty vector");
  if (!v.allFinite()) throw ParameterError(std::string(what) + ": non-finite entry");
}

void require_dim(const Vector& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dim " + std::to_string(dim) + ", got " +
                         std::to_string(v.size()));
  }
}

DenseMap::DenseMap(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw ShapeError("DenseMap: empty matrix");
  if (!m_.allFinite()) throw ParameterError("DenseMap: non-finite entry");
}

DenseMap DenseMap::identity(int n) { return DenseMap(Matrix::Identity(n, n)); }

DenseMap DenseMap::zero(int rows, int cols) { return DenseMap(Matrix::Zero(rows, cols)); }

DenseMap DenseMap::scalar(double a) { return DenseMap(Matrix::Constant(1, 1, a)); }

DenseMap DenseMap::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) throw ShapeError("DenseMap::from_rows: no rows");
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != c) throw ShapeError("DenseMap::from_rows: ragged rows");
    Eigen::Index j = 0;
    for (double e : row) m(i, j++) = e;
    ++i;
  }
  return DenseMap(std::move(m));
}

DenseMap DenseMap::certified(double tol) const {
  DenseMap out = *this;
  out.norm_bound_ = operator_norm(*this, tol) * (1.0 + tol);
  return out;
}

DenseMap DenseMap::adjoint() const { return DenseMap(m_.transpose()); }

DenseMap DenseMap::compose(const DenseMap& inner) const {
  if (cols() != inner.rows()) throw DimensionError("DenseMap::compose: inner codomain mismatch");
  return DenseMap(m_ * inner.m_);
}

DenseMap DenseMap::scaled(double s) const { return DenseMap(s * m_); }

Vector apply(const DenseMap& L, const Vector& x) {
  require_dim(x, L.cols(), "apply");
  return L.matrix() * x;
}

Vector adjoint_apply(const DenseMap& L, const Vector& y) {
  require_dim(y, L.rows(), "adjoint_apply");
  return L.matrix().transpose() * y;
}

double operator_norm(const DenseMap& L, double tol) {
  if (!(tol > 0)) throw ParameterError("operator_norm: tol must be positive");
  const Matrix& m = L.matrix();
  if (m.isZero(0.0)) return 0.0;
  const Matrix gram = m.transpose() * m;
  const Eigen::Index n = gram.rows();

  // Rayleigh quotients converge quadratically faster than the singular value,
  // so iterate on a tighter internal threshold.
  const double inner_tol = std::min(tol, 1e-12) * 1e-2;
  auto run = [&](Vector v) -> std::optional<double> {
    v.normalize();
    double prev = -1.0;
    for (int it = 0; it < 10000; ++it) {
      Vector w = gram * v;
      const double rq = v.dot(w);
      const double wn = w.norm();
      if (wn == 0.0) return std::nullopt;
      v = w / wn;
      if (prev >= 0 && std::abs(rq - prev) < inner_tol * rq) return rq;
      prev = rq;
    }
    throw ParameterError("operator_norm: no convergence within 10000 iterations");
  };
  // All-ones seed; alternate-sign seed when the first lies in ker L.
  auto rq = run(Vector::Ones(n));
  if (!rq || *rq <= 0) {
    Vector alt(n);
    for (Eigen::Index i = 0; i < n; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    rq = run(alt);
  }
  if (!rq || *rq <= 0) {
    Vector e = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n && (!rq || *rq <= 0); ++i) {
      e.setZero();
      e[i] = 1.0;
      rq = run(e);
    }
  }
  if (!rq) throw ParameterError("operator_norm: power iteration failed");
  return std::sqrt(*rq);
}

Vector gram_complement_apply(const DenseMap& L, const Vector& y) {
  require_dim(y, L.rows(), "gram_complement_apply");
  return y - L.matrix() * (L.matrix().transpose() * y);
}

Vector PseudoInverse::project_range(const Vector& v) const {
  if (range_basis.cols() == 0) return Vector::Zero(v.size());
  return range_basis * (range_basis.transpose() * v);
}

bool PseudoInverse::in_range(const Vector& v, double tol) const {
  return (v - project_range(v)).norm() <= tol;
}

PseudoInverse pseudo_inverse_small(const DenseMap& A, double rank_tol) {
  const Matrix& a = A.matrix();
  if (a.rows() != a.cols()) throw ShapeError("pseudo_inverse_small: matrix is not square");
  if (a.rows() > 32) throw ShapeError("pseudo_inverse_small: dimension exceeds 32");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > rank_tol * scale) {
    throw ShapeError("pseudo_inverse_small: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  const Vector& lam = es.eigenvalues();
  const Matrix& u = es.eigenvectors();
  const double lmax = std::max(0.0, lam.maxCoeff());
  const double cut = rank_tol * (lmax > 0 ? lmax : 1.0);
  if (lam.minCoeff() < -cut) throw ShapeError("pseudo_inverse_small: matrix is not positive semidefinite");

  const Eigen::Index n = a.rows();
  Matrix pinv = Matrix::Zero(n, n);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] > cut) ++rank;
  }
  Matrix range(n, rank), kernel(n, n - rank);
  Eigen::Index ri = 0, ki = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] > cut) {
      pinv += (1.0 / lam[i]) * u.col(i) * u.col(i).transpose();
      range.col(ri++) = u.col(i);
    } else {
      kernel.col(ki++) = u.col(i);
    }
  }
  return PseudoInverse{DenseMap(pinv), range, kernel};
}

}  // namespace proxkit
