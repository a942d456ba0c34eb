#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "proxkit/examples.hpp"
#include "proxkit/linalg.hpp"

using namespace proxkit;

TEST_CASE("apply and adjoint_apply on small operators") {
  CHECK(apply(DenseMap::identity(2), make_vector({3, 4})).isApprox(make_vector({3, 4})));
  CHECK(apply(DenseMap::scalar(0.5), make_vector({2}))[0] == doctest::Approx(1.0));
  CHECK(apply(examples::example1_operator(), Vector::Zero(2)).isZero(0.0));
  CHECK(apply(examples::example1_operator(), Vector::Zero(2)).size() == 5);
  CHECK(adjoint_apply(DenseMap::identity(2), make_vector({3, 4})).isApprox(make_vector({3, 4})));
  CHECK(adjoint_apply(DenseMap::scalar(0.5), make_vector({1}))[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(apply(DenseMap::identity(2), make_vector({1, 2, 3})), DimensionError);
  CHECK_THROWS_AS(adjoint_apply(DenseMap::identity(2), make_vector({1})), DimensionError);
}

TEST_CASE("adjoint identity over random pairs") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const DenseMap m(oracle::random_mat(rng, 3, 2));
    const Vector x = oracle::random_vec(rng, 2), y = oracle::random_vec(rng, 3);
    const double lhs = apply(m, x).dot(y), rhs = x.dot(adjoint_apply(m, y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + x.norm() * y.norm()));
  }
}

TEST_CASE("operator_norm matches closed-form references") {
  const double tol = 1e-10;
  CHECK(operator_norm(DenseMap::identity(3), tol) == doctest::Approx(1.0).epsilon(tol));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = 0.3;
  CHECK(std::abs(operator_norm(DenseMap(d), tol) - 0.5) <= tol * 0.5);
  CHECK(operator_norm(DenseMap::zero(3, 2), tol) == 0.0);

  const Matrix l = examples::example1_operator().matrix();
  const auto [lo, hi] = oracle::sym2_eigs(l.transpose() * l);
  (void)lo;
  CHECK(std::abs(operator_norm(examples::example1_operator(), tol) - std::sqrt(hi)) <= tol * std::sqrt(hi));
  // Seed orthogonal to the top singular vector.
  const DenseMap diff = DenseMap::from_rows({{1, -1}});
  CHECK(std::abs(operator_norm(diff, tol) - std::sqrt(2.0)) <= 1e-9);
  CHECK_THROWS_AS(operator_norm(DenseMap::identity(2), 0.0), ParameterError);
}

TEST_CASE("norm certificate bounds random unit vectors") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const DenseMap m = DenseMap(oracle::random_mat(rng, 4, 3)).certified();
    REQUIRE(m.norm_bound().has_value());
    CHECK(*m.norm_bound() >= oracle::spectral_norm(m.matrix()));
    for (int j = 0; j < 100; ++j) {
      Vector x = oracle::random_vec(rng, 3);
      x.normalize();
      CHECK(apply(m, x).norm() <= *m.norm_bound() * (1 + 1e-12));
    }
  }
}

TEST_CASE("gram_complement_apply") {
  CHECK(gram_complement_apply(DenseMap::scalar(0.5), make_vector({1}))[0] == doctest::Approx(0.75));
  // Coisometry: rows orthonormal.
  const double s = 1.0 / std::sqrt(2.0);
  const DenseMap co = DenseMap::from_rows({{s, s}});
  CHECK(gram_complement_apply(co, make_vector({3})).norm() <= 1e-15);
  const DenseMap pv = examples::projection_map();
  CHECK(gram_complement_apply(pv, make_vector({2, 0})).norm() == 0.0);
  CHECK(gram_complement_apply(pv, make_vector({0, 5})).isApprox(make_vector({0, 5})));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Matrix m = oracle::random_mat(rng, 3, 2);
    m /= oracle::spectral_norm(m);
    const Vector y = oracle::random_vec(rng, 3);
    CHECK(y.dot(gram_complement_apply(DenseMap(m), y)) >= -1e-10);
  }
}

TEST_CASE("pseudo_inverse_small") {
  const PseudoInverse id = pseudo_inverse_small(DenseMap::identity(3));
  CHECK(id.pinv.matrix().isApprox(Matrix::Identity(3, 3)));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  const PseudoInverse pd = pseudo_inverse_small(DenseMap(d));
  CHECK(pd.pinv.matrix()(0, 0) == doctest::Approx(0.5));
  CHECK(std::abs(pd.pinv.matrix()(1, 1)) < 1e-15);
  CHECK(pd.range_basis.cols() == 1);
  CHECK(pd.in_range(make_vector({3, 0}), 1e-12));
  CHECK_FALSE(pd.in_range(make_vector({0, 1}), 1e-12));

  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    const Matrix m = oracle::random_mat(rng, 2, 3);
    const Matrix a = m.transpose() * m;  // rank 2
    const Matrix p = pseudo_inverse_small(DenseMap(a)).pinv.matrix();
    CHECK((a * p * a - a).norm() <= 1e-9 * std::max(1.0, a.norm()));
    CHECK((p * a * p - p).norm() <= 1e-9 * std::max(1.0, p.norm()));
    CHECK(((a * p).transpose() - a * p).norm() <= 1e-9);
    CHECK(((p * a).transpose() - p * a).norm() <= 1e-9);
  }
  CHECK_THROWS_AS(pseudo_inverse_small(DenseMap::from_rows({{1, 2}, {0, 1}})), ShapeError);
  CHECK_THROWS_AS(pseudo_inverse_small(DenseMap::from_rows({{-1, 0}, {0, 1}})), ShapeError);
}
