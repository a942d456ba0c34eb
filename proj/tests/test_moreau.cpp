#include <doctest.h>

#include <random>

#include "catalog.hpp"
#include "oracles.hpp"
#include "proxkit/grid.hpp"
#include "proxkit/moreau.hpp"

using namespace proxkit;

TEST_CASE("envelope examples") {
  const ConvexFunction n1 = ConvexFunction::eucl_norm(1);
  CHECK(envelope(n1, 1, make_vector({0})) == 0.0);
  CHECK(envelope(n1, 1, make_vector({2})) == doctest::Approx(1.5));
  CHECK(envelope(n1, 1, make_vector({0.5})) == doctest::Approx(0.125));
  // Independent 1-D inf-convolution.
  for (double x : {2.0, 0.5, -1.3}) {
    const auto [v, arg] = oracle::min1d([&](double y) { return std::abs(y) + (x - y) * (x - y) / 2; }, -5, 5, 1e-3);
    (void)arg;
    CHECK(std::abs(envelope(n1, 1, make_vector({x})) - v) <= 1e-9);
  }
  CHECK_THROWS_AS(envelope(n1, 0, make_vector({1})), ParameterError);
}

TEST_CASE("envelope_gradient examples and finite differences") {
  CHECK(envelope_gradient(ConvexFunction::quadratic(1), 1, make_vector({2}))[0] == doctest::Approx(1.0));
  CHECK(envelope_gradient(ConvexFunction::eucl_norm(1), 1, make_vector({2}))[0] == doctest::Approx(1.0));
  std::mt19937_64 rng(61);
  for (int n : {1, 2}) {
    for (const auto& [name, f] : testcat::all(n)) {
      for (int k = 0; k < 50; ++k) {
        const double gamma = 0.8;
        const Vector x = oracle::random_vec(rng, n, 2.0);
        const Vector g = envelope_gradient(f, gamma, x);
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
          Vector e = Vector::Zero(n);
          e[i] = h;
          const double fd = (envelope(f, gamma, x + e) - envelope(f, gamma, x - e)) / (2 * h);
          CHECK_MESSAGE(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])), name);
        }
      }
    }
  }
  CHECK_THROWS_AS(envelope_gradient(ConvexFunction::quadratic(1), -1, make_vector({2})), ParameterError);
}

TEST_CASE("Moreau identity for envelopes of f and f*") {
  // envelope of f* at index 1 evaluated by brute force from the closed-form conjugate (1-D)
  // and through prox_conjugate in higher dimension.
  std::mt19937_64 rng(67);
  for (int n : {1, 2, 3}) {
    for (const auto& [name, f] : testcat::atoms(n)) {
      for (int k = 0; k < 100; ++k) {
        const Vector x = oracle::random_vec(rng, n, 2.0);
        const Vector p = prox_conjugate(f, 1, x);
        const double fs = conjugate_eval_closed(f, p).as_double();
        REQUIRE_MESSAGE(std::isfinite(fs), name);
        const double env_conj = fs + (x - p).squaredNorm() / 2;
        CHECK_MESSAGE(std::abs(envelope(f, 1, x) + env_conj - x.squaredNorm() / 2) <= 1e-9 * std::max(1.0, x.squaredNorm()),
                      name);
      }
    }
  }
}

TEST_CASE("envelope scaling identities") {
  std::mt19937_64 rng(71);
  for (const auto& [name, f] : testcat::all(2)) {
    for (int k = 0; k < 10; ++k) {
      const Vector x = oracle::random_vec(rng, 2, 2.0);
      const double gamma = 0.9, rho = 1.7;
      CHECK_MESSAGE(std::abs(rho * envelope(f, gamma, x) - envelope(f.scaled(rho), gamma / rho, x)) <=
                        1e-10 * std::max(1.0, std::abs(envelope(f, gamma, x))),
                    name);
      CHECK_MESSAGE(std::abs(envelope(f, gamma, rho * x) - envelope(f.scaled_arg(rho), gamma / (rho * rho), x)) <=
                        1e-10 * std::max(1.0, std::abs(envelope(f, gamma, rho * x))),
                    name);
    }
  }
}

TEST_CASE("monotone convergence of envelopes as gamma decreases") {
  std::mt19937_64 rng(73);
  for (const auto& [name, f] : testcat::all(2)) {
    const Vector x0 = oracle::random_vec(rng, 2);
    const Vector x = domain_contains(f, x0) ? x0 : prox(f, 1.0, x0);
    const double fx = eval(f, x).as_double();
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 30; ++k) {
      const double e = envelope(f, std::ldexp(1.0, -k), x);
      CHECK_MESSAGE(e >= prev - 1e-12, name);
      prev = e;
    }
    CHECK_MESSAGE(std::abs(prev - fx) <= 1e-6 * std::max(1.0, std::abs(fx)), name);
  }
}

TEST_CASE("conjugate_numeric examples") {
  const SolveReport q = conjugate_numeric(ConvexFunction::quadratic(1), make_vector({3}));
  CHECK(q.status == SolveStatus::Converged);
  CHECK(q.value.value() == doctest::Approx(4.5).epsilon(1e-8));
  const SolveReport l = conjugate_numeric(ConvexFunction::l1_norm(2), make_vector({0.5, -0.9}));
  CHECK(l.status == SolveStatus::Converged);
  CHECK(std::abs(l.value.value()) <= 1e-6);
  const SolveReport d = conjugate_numeric(ConvexFunction::l1_norm(2), make_vector({1.5, 0}));
  CHECK(d.status == SolveStatus::Diverged);
  CHECK(d.value.is_infinite());
}

TEST_CASE("conjugate_numeric agrees with closed forms") {
  std::mt19937_64 rng(79);
  for (int n : {1, 2}) {
    for (const auto& [name, f] : testcat::all(n)) {
      for (int k = 0; k < 5; ++k) {
        const Vector s = oracle::random_vec(rng, n, 0.4);
        const double closed = conjugate_eval_closed(f, s).as_double();
        const SolveReport r = conjugate_numeric(f, s);
        if (std::isinf(closed)) {
          CHECK_MESSAGE(r.status != SolveStatus::Converged, name);
        } else if (r.status == SolveStatus::Converged) {
          CHECK_MESSAGE(std::abs(r.value.value() - closed) <= 1e-6 * std::max(1.0, std::abs(closed)), name);
        } else {
          // Finite supremum that is not attained (e.g. boundary of dom f*).
          CHECK_MESSAGE(r.status == SolveStatus::MaxIter, name);
        }
      }
    }
  }
}

TEST_CASE("conjugate of an envelope adds the quadratic") {
  std::mt19937_64 rng(83);
  for (const auto& [name, f] : testcat::atoms(2)) {
    const double gamma = 0.6;
    const ConvexFunction e = f.moreau_envelope(gamma);
    for (int k = 0; k < 5; ++k) {
      const Vector s = oracle::random_vec(rng, 2, 0.3);
      const double closed = conjugate_eval_closed(f, s).as_double();
      if (std::isinf(closed)) continue;
      const SolveReport r = conjugate_numeric(e, s);
      REQUIRE_MESSAGE(r.status == SolveStatus::Converged, name);
      CHECK_MESSAGE(std::abs(r.value.value() - (closed + gamma * s.squaredNorm() / 2)) <= 1e-5, name);
    }
  }
}

TEST_CASE("grid oracle examples") {
  GridProblem q;
  q.f = [](const Vector& y) { return 0.5 * y.squaredNorm(); };
  q.dim = 1;
  q.point = make_vector({3});
  CHECK(std::abs(grid_oracle(GridKind::Conjugate, q, {-10, 10, 2001}).value - 4.5) <= 1e-4);

  GridProblem e;
  e.f = [](const Vector& y) { return y.norm(); };
  e.dim = 1;
  e.point = make_vector({2});
  e.lipschitz = 1.0;
  const GridResult er = grid_oracle(GridKind::Envelope, e, {-6, 6, 2001});
  CHECK(std::abs(er.value - 1.5) <= 1e-3);
  REQUIRE(er.error_bound.has_value());

  GridProblem p;
  const ConvexFunction d = ConvexFunction::dist_ball(Vector::Zero(1), 2);
  p.f = [&](const Vector& y) { return eval(d, y).as_double(); };
  p.dim = 1;
  p.point = make_vector({4});
  const GridResult pr = grid_oracle(GridKind::Prox, p, {-6, 6, 12000});
  CHECK(std::abs(pr.argmin[0] - 3) <= pr.step);

  GridProblem c;
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  c.f = [&](const Vector& y) { return eval(abs1, y).as_double() + 0.5 * y.squaredNorm() * 0.75; };
  c.dim = 1;
  c.point = make_vector({0.5});
  c.op = DenseMap::scalar(0.5);
  c.constraint_tol = 1e-3;
  const GridResult cr = grid_oracle(GridKind::ConstrainedMin, c, {-3, 3, 2001});
  CHECK(std::abs(cr.argmin[0] - 1.0) <= 2 * cr.step + 2e-3);

  GridProblem three;
  three.f = [](const Vector&) { return 0.0; };
  three.dim = 3;
  three.point = Vector::Zero(3);
  CHECK_THROWS_AS(grid_oracle(GridKind::Envelope, three, {-1, 1, 10}), UnsupportedDimension);
  CHECK_THROWS_AS(grid_oracle(GridKind::Envelope, [] {
    GridProblem g;
    g.f = [](const Vector&) { return 0.0; };
    g.dim = 2;
    g.point = Vector::Zero(2);
    return g;
  }(), {-1, 1, 3000}), ParameterError);
}

TEST_CASE("grid kernels: parallel and serial agree, ties go to the lowest index") {
  const GridSpec g{-2, 2, 301};
  Objective bowl = [](const Vector& y) { return (y - make_vector({0.31, -0.77})).squaredNorm(); };
  const GridArgmin a = grid_argmin(bowl, 2, g), b = grid_argmin_serial(bowl, 2, g);
  CHECK(a.index == b.index);
  CHECK(a.value == b.value);
  Objective flat = [](const Vector&) { return 1.0; };
  CHECK(grid_argmin(flat, 2, g).index == 0);
  CHECK(grid_argmin_serial(flat, 1, g).index == 0);
  Objective plateau = [](const Vector& y) { return std::max(0.0, std::abs(y[0]) - 0.5); };
  const GridArgmin pa = grid_argmin(plateau, 1, g);
  CHECK(pa.index == grid_argmin_serial(plateau, 1, g).index);
  CHECK(grid_point(1, g, pa.index)[0] >= -0.5 - g.step());
  CHECK(grid_point(1, g, pa.index)[0] <= -0.5 + g.step());
}

TEST_CASE("grid zoom refines convex minima") {
  GridProblem e;
  e.f = [](const Vector& y) { return y.norm(); };
  e.dim = 2;
  e.point = make_vector({2, 1});
  const GridResult coarse = grid_oracle(GridKind::Envelope, e, {-4, 4, 201});
  const GridResult fine = grid_oracle(GridKind::Envelope, e, {-4, 4, 201, 3});
  const double exact = std::sqrt(5.0) - 0.5;
  CHECK(std::abs(fine.value - exact) <= std::abs(coarse.value - exact) + 1e-15);
  CHECK(std::abs(fine.value - exact) <= 1e-6);
}
