#pragma once

#include <initializer_list>
#include <optional>

#include <Eigen/Dense>

#include "proxkit/errors.hpp"

namespace proxkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

Vector make_vector(std::initializer_list<double> entries);
// Throws ParameterError when any entry is NaN or infinite, or the vector is empty.
void require_finite(const Vector& v, const char* what);
void require_dim(const Vector& v, Eigen::Index dim, const char* what);

// Dense operator H -> G stored as a rows x cols matrix (rows = dim G).
class DenseMap {
 public:
  explicit DenseMap(Matrix entries);

  static DenseMap identity(int n);
  static DenseMap zero(int rows, int cols);
  static DenseMap scalar(double a);
  static DenseMap from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

  std::optional<double> norm_bound() const { return norm_bound_; }
  // Copy carrying norm_bound = sigma * (1 + tol) from operator_norm.
  DenseMap certified(double tol = 1e-10) const;

  DenseMap adjoint() const;
  // (*this) o inner
  DenseMap compose(const DenseMap& inner) const;
  DenseMap scaled(double s) const;

 private:
  Matrix m_;
  std::optional<double> norm_bound_;
};

Vector apply(const DenseMap& L, const Vector& x);
Vector adjoint_apply(const DenseMap& L, const Vector& y);

// Largest singular value by power iteration on L*L.
double operator_norm(const DenseMap& L, double tol = 1e-10);

// y - L(L*y)
Vector gram_complement_apply(const DenseMap& L, const Vector& y);

struct PseudoInverse {
  DenseMap pinv;
  Matrix range_basis;  // orthonormal columns spanning ran A (may have 0 columns)
  Matrix kernel_basis;  // orthonormal complement of range_basis

  Vector project_range(const Vector& v) const;
  bool in_range(const Vector& v, double tol) const;
};

PseudoInverse pseudo_inverse_small(const DenseMap& A, double rank_tol = 1e-10);

}  // namespace proxkit
