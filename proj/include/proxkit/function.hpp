#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxkit/ext_real.hpp"
#include "proxkit/linalg.hpp"

namespace proxkit {

// Absolute tolerance for indicator-set membership.
inline constexpr double kMembershipTol = 1e-9;

class ConvexFunction;

namespace atom {
struct L1Norm {
  Eigen::Index dim;
};
struct EuclNorm {
  Eigen::Index dim;
};
// x -> <x, A x> / 2 with A symmetric PSD
struct QuadForm {
  Matrix a;
  Matrix pinv;
  Matrix range_basis;
};
// x -> <u, x> + alpha
struct Affine {
  Vector u;
  double alpha;
};
struct IndicatorBall {
  Vector center;
  double radius;
};
// Indicator of span(basis); basis columns orthonormal, possibly zero columns.
struct IndicatorSubspace {
  Matrix basis;
};
// Distance to the closed ball B(center, radius)
struct DistBall {
  Vector center;
  double radius;
};
// Support function of B(center, radius): <center, x> + radius * ||x||
struct SupportBall {
  Vector center;
  double radius;
};
struct Block;
struct SeparableSum {
  std::vector<Block> blocks;
};
}  // namespace atom

using Atom = std::variant<atom::L1Norm, atom::EuclNorm, atom::QuadForm, atom::Affine, atom::IndicatorBall,
                          atom::IndicatorSubspace, atom::DistBall, atom::SupportBall, atom::SeparableSum>;

namespace transform {
// x -> h(x - shift)
struct Translate {
  Vector shift;
};
// x -> h(factor * x)
struct ScaleArg {
  double factor;
};
// x -> factor * h(x)
struct ScaleVal {
  double factor;
};
// x -> h(x) + <slope, x> + offset
struct AddAffine {
  Vector slope;
  double offset;
};
// x -> h(x) + weight * ||x||^2 / 2
struct AddQuad {
  double weight;
};
// Moreau envelope of h with the given index
struct Envelope {
  double index;
};
}  // namespace transform

using Transform = std::variant<transform::Translate, transform::ScaleArg, transform::ScaleVal,
                               transform::AddAffine, transform::AddQuad, transform::Envelope>;

// Immutable Gamma_0 function: catalog atom followed by transforms (outermost last).
class ConvexFunction {
 public:
  static ConvexFunction l1_norm(Eigen::Index dim);
  static ConvexFunction eucl_norm(Eigen::Index dim);
  static ConvexFunction quad_form(const Matrix& a);
  static ConvexFunction quadratic(Eigen::Index dim);  // ||x||^2 / 2
  static ConvexFunction affine(Vector u, double alpha);
  static ConvexFunction indicator_ball(Vector center, double radius);
  static ConvexFunction indicator_subspace(Matrix basis);
  static ConvexFunction dist_ball(Vector center, double radius);
  static ConvexFunction support_ball(Vector center, double radius);
  static ConvexFunction separable_sum(std::vector<atom::Block> blocks);

  ConvexFunction translated(Vector shift) const;
  ConvexFunction scaled_arg(double factor) const;
  ConvexFunction scaled(double factor) const;
  ConvexFunction plus_affine(Vector slope, double offset) const;
  ConvexFunction plus_quadratic(double weight) const;
  ConvexFunction moreau_envelope(double index) const;

  Eigen::Index dim() const;
  const Atom& atom() const;
  const std::vector<Transform>& transforms() const;

 private:
  struct Repr;
  explicit ConvexFunction(std::shared_ptr<const Repr> r) : repr_(std::move(r)) {}
  ConvexFunction with(Transform t) const;
  std::shared_ptr<const Repr> repr_;
};

namespace atom {
// Block occupying coordinates [offset, offset + fn.dim()) with value weight * fn.
struct Block {
  double weight;
  ConvexFunction fn;
  Eigen::Index offset;
};
}  // namespace atom

ExtReal eval(const ConvexFunction& f, const Vector& x);
Vector prox(const ConvexFunction& f, double gamma, const Vector& x);
// prox of gamma * f^* at x
Vector prox_conjugate(const ConvexFunction& f, double gamma, const Vector& x);
ExtReal conjugate_eval_closed(const ConvexFunction& f, const Vector& xstar);
ExtReal recession_eval(const ConvexFunction& f, const Vector& x);
std::optional<double> lipschitz_bound(const ConvexFunction& f);
bool domain_contains(const ConvexFunction& f, const Vector& x, double tol = kMembershipTol);
bool has_full_domain(const ConvexFunction& f);

// Canonical text form, stable across runs (used in report digests).
std::string describe(const ConvexFunction& f);

}  // namespace proxkit
