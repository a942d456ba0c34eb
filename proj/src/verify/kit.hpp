#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "proxkit/mixture.hpp"
#include "proxkit/proxcomp.hpp"
#include "proxkit/verify.hpp"

// Shared pieces of the property suites: seeded generators, small independent
// oracles, slack rules and case constructors.
namespace proxkit::verify::kit {

using Rng = std::mt19937_64;

inline constexpr double kIneqSlack = 1e-6;

double unif(Rng& rng, double a, double b);
double log_unif(Rng& rng, double a, double b);
int pick(Rng& rng, int n);
Vector gauss(Rng& rng, Eigen::Index n, double scale = 1.0);
// Uniform in the ball of radius r.
Vector in_ball(Rng& rng, Eigen::Index n, double r);
Matrix gauss_mat(Rng& rng, Eigen::Index rows, Eigen::Index cols);

double spectral_norm(const Matrix& m);
DenseMap with_norm(const Matrix& m, double norm);
// Gaussian matrix rescaled to a spectral norm drawn from [lo, hi].
DenseMap random_map(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.3, double hi = 0.95);
// Orthonormal columns (rows >= cols).
DenseMap isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols);
// Orthonormal rows (rows <= cols).
DenseMap coisometry(Rng& rng, Eigen::Index rows, Eigen::Index cols);
// Orthogonal projector of R^n onto a random k-dimensional subspace.
DenseMap projector(Rng& rng, Eigen::Index n, Eigen::Index k);
// One of the norm-one shapes above chosen at random, H = R^n.
DenseMap unit_norm_map(Rng& rng, Eigen::Index n, int max_dim);
// Operator on H = R^n: a quarter of the draws have norm one, the rest norm in
// [0.3, 0.95]. With `tall` the operator is injective (rows >= n).
DenseMap draw_map(Rng& rng, Eigen::Index n, int max_dim, bool tall);

// beta-Lipschitz functions on R^m.
ConvexFunction lipschitz_fn(Rng& rng, Eigen::Index m, double beta);
// Finite everywhere.
ConvexFunction full_domain_fn(Rng& rng, Eigen::Index m);
// Full-domain or indicator-type, 0 in the interior of the domain.
ConvexFunction general_fn(Rng& rng, Eigen::Index m);
// Finite everywhere and with a minimizer in the ball of radius `spread`.
ConvexFunction coercive_fn(Rng& rng, Eigen::Index m, double spread);

// Every atom of the catalog on R^m with fixed parameters.
struct NamedAtom {
  std::string name;
  ConvexFunction f;
};
std::vector<NamedAtom> catalog_atoms(Eigen::Index m);

// prox of gamma f^* for an untransformed atom, from the closed form of f^*.
Vector conjugate_prox_reference(const ConvexFunction& f, double gamma, const Vector& x);

// Minimum of a convex function of one variable: cell-centre grid on
// [lo, hi] followed by `zooms` regrids of width 4 cells around the incumbent.
struct LineMin {
  double value;
  double arg;
};
LineMin line_min(const std::function<double(double)>& f, double lo, double hi, long steps, int zooms);

// inf { phi(y) : A^T y = x } for A with at most one-dimensional kernel of A^T;
// +inf when x is not in the range of A^T.
struct FibreMin {
  double value;
  Vector point;  // empty when the fibre is empty
};
FibreMin fibre_argmin(const Matrix& a, const std::function<double(const Vector&)>& phi, const Vector& x,
                      double radius, long steps, int zooms);
double fibre_min(const Matrix& a, const std::function<double(const Vector&)>& phi, const Vector& x, double radius,
                 long steps, int zooms);

// Absolute error estimate carried by a solver report.
double err(const SolveReport& r);
double val(const SolveReport& r);
double ineq_slack(std::initializer_list<double> errs);
// 2 x sum of the component tolerances, each relative to max(1, |value|).
double eq_slack(double tol, std::initializer_list<double> values);

Case equal(std::string label, std::string digest, double expected, double got, double slack);
Case at_most(std::string label, std::string digest, double bound, double got, double slack);
Case at_least(std::string label, std::string digest, double bound, double got, double slack);
Case within(std::string label, std::string digest, double lower, double upper, double got, double slack);
bool holds(const Case& c);

class Digest {
 public:
  Digest();
  Digest& operator<<(double v);
  Digest& operator<<(std::string_view s);
  Digest& operator<<(const Vector& v);
  Digest& operator<<(const Matrix& m);
  Digest& operator<<(const DenseMap& m) { return *this << m.matrix(); }
  Digest& operator<<(const ConvexFunction& f) { return *this << std::string_view(describe(f)); }
  std::string str() const;

 private:
  std::ostringstream os_;
};

// Runs `fn` on n instances, each with its own generator from (seed, suite, i);
// cases are concatenated in instance order. An exception inside an instance
// becomes a failing case.
using Instance = std::function<void(Rng&, std::vector<Case>&)>;
std::vector<Case> run_instances(std::string_view suite, std::uint64_t seed, std::size_t n, const Instance& fn);
using IndexedInstance = std::function<void(std::size_t, Rng&, std::vector<Case>&)>;
std::vector<Case> run_indexed(std::string_view suite, std::uint64_t seed, std::size_t n, const IndexedInstance& fn);

}  // namespace proxkit::verify::kit
