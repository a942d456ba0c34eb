#include "proxkit/function.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace proxkit {

struct ConvexFunction::Repr {
  Atom atom;
  std::vector<Transform> transforms;
  Eigen::Index dim;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive and finite");
}

void require_gamma(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive and finite");
}

Vector block_soft(const Vector& x, double t) {
  const double n = x.norm();
  if (n <= t) return Vector::Zero(x.size());
  return (1.0 - t / n) * x;
}

Vector project_ball(const Vector& x, const Vector& c, double r) {
  const Vector d = x - c;
  const double n = d.norm();
  if (n <= r) return x;
  return c + (r / n) * d;
}

double indicator(bool inside) { return inside ? 0.0 : kInf; }

// All per-level routines work on "the function made of the atom plus the first
// `level` transforms".
struct Impl {
  const Atom& atom;
  const std::vector<Transform>& ts;

  double eval(std::size_t level, const Vector& x, double tol) const;
  Vector prox(std::size_t level, double gamma, const Vector& x) const;
  Vector prox_conj(std::size_t level, double gamma, const Vector& x) const {
    return x - gamma * prox(level, 1.0 / gamma, x / gamma);
  }
  double conj(std::size_t level, const Vector& s, double tol) const;
  double rec(std::size_t level, const Vector& d, double tol) const;
  std::optional<double> lip(std::size_t level) const;
  bool full_domain(std::size_t level) const;

  double atom_eval(const Vector& x, double tol) const;
  Vector atom_prox(double gamma, const Vector& x) const;
  double atom_conj(const Vector& s, double tol) const;
  double atom_rec(const Vector& d, double tol) const;
  std::optional<double> atom_lip() const;
  bool atom_full_domain() const;
};

Impl impl_of(const ConvexFunction& f);

double Impl::atom_eval(const Vector& x, double tol) const {
  return std::visit(
      Overloaded{
          [&](const atom::L1Norm&) { return x.lpNorm<1>(); },
          [&](const atom::EuclNorm&) { return x.norm(); },
          [&](const atom::QuadForm& q) { return 0.5 * x.dot(q.a * x); },
          [&](const atom::Affine& a) { return a.u.dot(x) + a.alpha; },
          [&](const atom::IndicatorBall& b) { return indicator((x - b.center).norm() <= b.radius + tol); },
          [&](const atom::IndicatorSubspace& v) {
            const Vector p = v.basis * (v.basis.transpose() * x);
            return indicator((x - p).norm() <= tol);
          },
          [&](const atom::DistBall& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
          [&](const atom::SupportBall& b) { return b.center.dot(x) + b.radius * x.norm(); },
          [&](const atom::SeparableSum& s) {
            double total = 0.0;
            for (const auto& blk : s.blocks) {
              const Impl sub = impl_of(blk.fn);
              const double v = sub.eval(sub.ts.size(), x.segment(blk.offset, blk.fn.dim()), tol);
              if (v == kInf) return kInf;
              total += blk.weight * v;
            }
            return total;
          },
      },
      atom);
}

Vector Impl::atom_prox(double gamma, const Vector& x) const {
  return std::visit(
      Overloaded{
          [&](const atom::L1Norm&) -> Vector {
            return x.unaryExpr([gamma](double v) { return std::copysign(std::max(std::abs(v) - gamma, 0.0), v); });
          },
          [&](const atom::EuclNorm&) -> Vector { return block_soft(x, gamma); },
          [&](const atom::QuadForm& q) -> Vector {
            const Matrix m = Matrix::Identity(x.size(), x.size()) + gamma * q.a;
            return m.llt().solve(x);
          },
          [&](const atom::Affine& a) -> Vector { return x - gamma * a.u; },
          [&](const atom::IndicatorBall& b) -> Vector { return project_ball(x, b.center, b.radius); },
          [&](const atom::IndicatorSubspace& v) -> Vector { return v.basis * (v.basis.transpose() * x); },
          [&](const atom::DistBall& b) -> Vector {
            const Vector pc = project_ball(x, b.center, b.radius);
            const double d = (x - pc).norm();
            if (d <= gamma) return pc;
            return x + (gamma / d) * (pc - x);
          },
          [&](const atom::SupportBall& b) -> Vector { return block_soft(x - gamma * b.center, gamma * b.radius); },
          [&](const atom::SeparableSum& s) -> Vector {
            Vector out(x.size());
            for (const auto& blk : s.blocks) {
              const Impl sub = impl_of(blk.fn);
              out.segment(blk.offset, blk.fn.dim()) =
                  sub.prox(sub.ts.size(), gamma * blk.weight, x.segment(blk.offset, blk.fn.dim()));
            }
            return out;
          },
      },
      atom);
}

double Impl::atom_conj(const Vector& s, double tol) const {
  return std::visit(
      Overloaded{
          [&](const atom::L1Norm&) { return indicator(s.lpNorm<Eigen::Infinity>() <= 1.0 + tol); },
          [&](const atom::EuclNorm&) { return indicator(s.norm() <= 1.0 + tol); },
          [&](const atom::QuadForm& q) {
            const Vector p = q.range_basis.cols() ? Vector(q.range_basis * (q.range_basis.transpose() * s))
                                                  : Vector(Vector::Zero(s.size()));
            if ((s - p).norm() > tol) return kInf;
            return 0.5 * s.dot(q.pinv * s);
          },
          [&](const atom::Affine& a) { return (s - a.u).norm() <= tol ? -a.alpha : kInf; },
          [&](const atom::IndicatorBall& b) { return b.center.dot(s) + b.radius * s.norm(); },
          [&](const atom::IndicatorSubspace& v) {
            return indicator((v.basis.transpose() * s).norm() <= tol);
          },
          [&](const atom::DistBall& b) {
            const double n = s.norm();
            if (n > 1.0 + tol) return kInf;
            return b.center.dot(s) + b.radius * n;
          },
          [&](const atom::SupportBall& b) { return indicator((s - b.center).norm() <= b.radius + tol); },
          [&](const atom::SeparableSum& sum) {
            double total = 0.0;
            for (const auto& blk : sum.blocks) {
              const Impl sub = impl_of(blk.fn);
              const double v = sub.conj(sub.ts.size(), s.segment(blk.offset, blk.fn.dim()) / blk.weight, tol);
              if (v == kInf) return kInf;
              total += blk.weight * v;
            }
            return total;
          },
      },
      atom);
}

double Impl::atom_rec(const Vector& d, double tol) const {
  return std::visit(
      Overloaded{
          [&](const atom::L1Norm&) { return d.lpNorm<1>(); },
          [&](const atom::EuclNorm&) { return d.norm(); },
          [&](const atom::QuadForm& q) { return indicator((q.a * d).norm() <= tol); },
          [&](const atom::Affine& a) { return a.u.dot(d); },
          [&](const atom::IndicatorBall&) { return indicator(d.norm() <= tol); },
          [&](const atom::IndicatorSubspace& v) {
            const Vector p = v.basis * (v.basis.transpose() * d);
            return indicator((d - p).norm() <= tol);
          },
          [&](const atom::DistBall&) { return d.norm(); },
          [&](const atom::SupportBall& b) { return b.center.dot(d) + b.radius * d.norm(); },
          [&](const atom::SeparableSum& s) {
            double total = 0.0;
            for (const auto& blk : s.blocks) {
              const Impl sub = impl_of(blk.fn);
              const double v = sub.rec(sub.ts.size(), d.segment(blk.offset, blk.fn.dim()), tol);
              if (v == kInf) return kInf;
              total += blk.weight * v;
            }
            return total;
          },
      },
      atom);
}

std::optional<double> Impl::atom_lip() const {
  return std::visit(Overloaded{
                        [&](const atom::L1Norm& a) -> std::optional<double> {
                          return std::sqrt(static_cast<double>(a.dim));
                        },
                        [&](const atom::EuclNorm&) -> std::optional<double> { return 1.0; },
                        [&](const atom::QuadForm&) -> std::optional<double> { return std::nullopt; },
                        [&](const atom::Affine& a) -> std::optional<double> { return a.u.norm(); },
                        [&](const atom::IndicatorBall&) -> std::optional<double> { return std::nullopt; },
                        [&](const atom::IndicatorSubspace&) -> std::optional<double> { return std::nullopt; },
                        [&](const atom::DistBall&) -> std::optional<double> { return 1.0; },
                        [&](const atom::SupportBall& b) -> std::optional<double> {
                          return b.center.norm() + b.radius;
                        },
                        [&](const atom::SeparableSum& s) -> std::optional<double> {
                          double sq = 0.0;
                          for (const auto& blk : s.blocks) {
                            const auto b = lipschitz_bound(blk.fn);
                            if (!b) return std::nullopt;
                            sq += (blk.weight * *b) * (blk.weight * *b);
                          }
                          return std::sqrt(sq);
                        },
                    },
                    atom);
}

bool Impl::atom_full_domain() const {
  return std::visit(Overloaded{
                        [](const atom::IndicatorBall&) { return false; },
                        [](const atom::IndicatorSubspace&) { return false; },
                        [](const atom::SeparableSum& s) {
                          for (const auto& blk : s.blocks) {
                            if (!has_full_domain(blk.fn)) return false;
                          }
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    atom);
}

double Impl::eval(std::size_t level, const Vector& x, double tol) const {
  if (level == 0) return atom_eval(x, tol);
  const std::size_t k = level - 1;
  return std::visit(
      Overloaded{
          [&](const transform::Translate& t) { return eval(k, x - t.shift, tol); },
          [&](const transform::ScaleArg& t) { return eval(k, t.factor * x, tol); },
          [&](const transform::ScaleVal& t) {
            const double v = eval(k, x, tol);
            return v == kInf ? kInf : t.factor * v;
          },
          [&](const transform::AddAffine& t) {
            const double v = eval(k, x, tol);
            return v == kInf ? kInf : v + t.slope.dot(x) + t.offset;
          },
          [&](const transform::AddQuad& t) {
            const double v = eval(k, x, tol);
            return v == kInf ? kInf : v + 0.5 * t.weight * x.squaredNorm();
          },
          [&](const transform::Envelope& t) {
            const Vector p = prox(k, t.index, x);
            // p lies in dom h by construction; evaluate with a looser tolerance
            // so rounding at indicator boundaries cannot produce +inf.
            return eval(k, p, std::max(tol, 1e-7)) + (x - p).squaredNorm() / (2.0 * t.index);
          },
      },
      ts[k]);
}

Vector Impl::prox(std::size_t level, double gamma, const Vector& x) const {
  if (level == 0) return atom_prox(gamma, x);
  const std::size_t k = level - 1;
  return std::visit(Overloaded{
                        [&](const transform::Translate& t) -> Vector { return t.shift + prox(k, gamma, x - t.shift); },
                        [&](const transform::ScaleArg& t) -> Vector {
                          const double r = t.factor;
                          return prox(k, gamma * r * r, r * x) / r;
                        },
                        [&](const transform::ScaleVal& t) -> Vector { return prox(k, gamma * t.factor, x); },
                        [&](const transform::AddAffine& t) -> Vector { return prox(k, gamma, x - gamma * t.slope); },
                        [&](const transform::AddQuad& t) -> Vector {
                          const double s = 1.0 + gamma * t.weight;
                          return prox(k, gamma / s, x / s);
                        },
                        [&](const transform::Envelope& t) -> Vector {
                          const double w = gamma / (gamma + t.index);
                          return x + w * (prox(k, gamma + t.index, x) - x);
                        },
                    },
                    ts[k]);
}

double Impl::conj(std::size_t level, const Vector& s, double tol) const {
  if (level == 0) return atom_conj(s, tol);
  const std::size_t k = level - 1;
  return std::visit(
      Overloaded{
          [&](const transform::Translate& t) {
            const double v = conj(k, s, tol);
            return v == kInf ? kInf : v + s.dot(t.shift);
          },
          [&](const transform::ScaleArg& t) { return conj(k, s / t.factor, tol); },
          [&](const transform::ScaleVal& t) {
            const double v = conj(k, s / t.factor, tol);
            return v == kInf ? kInf : t.factor * v;
          },
          [&](const transform::AddAffine& t) {
            const double v = conj(k, s - t.slope, tol);
            return v == kInf ? kInf : v - t.offset;
          },
          [&](const transform::AddQuad& t) {
            if (t.weight == 0.0) return conj(k, s, tol);
            // (h + rho Q)^* is the envelope of h^* with index rho; evaluated
            // through the envelope form of the Moreau identity so only h and
            // its prox are needed.
            const double rho = t.weight;
            const Vector u = s / rho;
            const Vector p = prox(k, 1.0 / rho, u);
            const double env_h = eval(k, p, std::max(tol, 1e-7)) + 0.5 * rho * (u - p).squaredNorm();
            return s.squaredNorm() / (2.0 * rho) - env_h;
          },
          [&](const transform::Envelope& t) {
            const double v = conj(k, s, tol);
            return v == kInf ? kInf : v + 0.5 * t.index * s.squaredNorm();
          },
      },
      ts[k]);
}

double Impl::rec(std::size_t level, const Vector& d, double tol) const {
  if (level == 0) return atom_rec(d, tol);
  const std::size_t k = level - 1;
  return std::visit(Overloaded{
                        [&](const transform::Translate&) { return rec(k, d, tol); },
                        [&](const transform::ScaleArg& t) { return rec(k, t.factor * d, tol); },
                        [&](const transform::ScaleVal& t) {
                          const double v = rec(k, d, tol);
                          return v == kInf ? kInf : t.factor * v;
                        },
                        [&](const transform::AddAffine& t) {
                          const double v = rec(k, d, tol);
                          return v == kInf ? kInf : v + t.slope.dot(d);
                        },
                        [&](const transform::AddQuad& t) {
                          if (t.weight == 0.0) return rec(k, d, tol);
                          return indicator(d.norm() <= tol);
                        },
                        [&](const transform::Envelope&) { return rec(k, d, tol); },
                    },
                    ts[k]);
}

std::optional<double> Impl::lip(std::size_t level) const {
  if (level == 0) return atom_lip();
  const std::size_t k = level - 1;
  const auto inner = lip(k);
  return std::visit(Overloaded{
                        [&](const transform::Translate&) { return inner; },
                        [&](const transform::ScaleArg& t) -> std::optional<double> {
                          if (!inner) return std::nullopt;
                          return t.factor * *inner;
                        },
                        [&](const transform::ScaleVal& t) -> std::optional<double> {
                          if (!inner) return std::nullopt;
                          return t.factor * *inner;
                        },
                        [&](const transform::AddAffine& t) -> std::optional<double> {
                          if (!inner) return std::nullopt;
                          return *inner + t.slope.norm();
                        },
                        [&](const transform::AddQuad& t) -> std::optional<double> {
                          if (t.weight == 0.0) return inner;
                          return std::nullopt;
                        },
                        [&](const transform::Envelope&) { return inner; },
                    },
                    ts[k]);
}

bool Impl::full_domain(std::size_t level) const {
  for (std::size_t k = level; k-- > 0;) {
    if (std::holds_alternative<transform::Envelope>(ts[k])) return true;
  }
  return atom_full_domain();
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

ConvexFunction ConvexFunction::l1_norm(Eigen::Index dim) {
  if (dim <= 0) throw DimensionError("l1_norm: dim must be positive");
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::L1Norm{dim}, {}, dim}));
}

ConvexFunction ConvexFunction::eucl_norm(Eigen::Index dim) {
  if (dim <= 0) throw DimensionError("eucl_norm: dim must be positive");
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::EuclNorm{dim}, {}, dim}));
}

ConvexFunction ConvexFunction::quad_form(const Matrix& a) {
  const DenseMap am(a);
  PseudoInverse pi = pseudo_inverse_small(am);
  const Eigen::Index dim = a.rows();
  const Matrix sym = 0.5 * (a + a.transpose());
  return ConvexFunction(
      std::make_shared<const Repr>(Repr{atom::QuadForm{sym, pi.pinv.matrix(), pi.range_basis}, {}, dim}));
}

ConvexFunction ConvexFunction::quadratic(Eigen::Index dim) {
  if (dim <= 0) throw DimensionError("quadratic: dim must be positive");
  return quad_form(Matrix::Identity(dim, dim));
}

ConvexFunction ConvexFunction::affine(Vector u, double alpha) {
  require_finite(u, "affine slope");
  if (!std::isfinite(alpha)) throw ParameterError("affine: offset must be finite");
  const Eigen::Index dim = u.size();
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::Affine{std::move(u), alpha}, {}, dim}));
}

ConvexFunction ConvexFunction::indicator_ball(Vector center, double radius) {
  require_finite(center, "indicator_ball center");
  if (!(radius >= 0) || !std::isfinite(radius)) throw ParameterError("indicator_ball: radius must be >= 0");
  const Eigen::Index dim = center.size();
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::IndicatorBall{std::move(center), radius}, {}, dim}));
}

ConvexFunction ConvexFunction::indicator_subspace(Matrix basis) {
  if (basis.rows() == 0) throw DimensionError("indicator_subspace: ambient dim must be positive");
  if (!basis.allFinite()) throw ParameterError("indicator_subspace: non-finite basis");
  if (basis.cols() > 0) {
    const Matrix gram = basis.transpose() * basis;
    if ((gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() > 1e-9) {
      throw ShapeError("indicator_subspace: basis columns are not orthonormal");
    }
  }
  const Eigen::Index dim = basis.rows();
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::IndicatorSubspace{std::move(basis)}, {}, dim}));
}

ConvexFunction ConvexFunction::dist_ball(Vector center, double radius) {
  require_finite(center, "dist_ball center");
  if (!(radius >= 0) || !std::isfinite(radius)) throw ParameterError("dist_ball: radius must be >= 0");
  const Eigen::Index dim = center.size();
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::DistBall{std::move(center), radius}, {}, dim}));
}

ConvexFunction ConvexFunction::support_ball(Vector center, double radius) {
  require_finite(center, "support_ball center");
  if (!(radius >= 0) || !std::isfinite(radius)) throw ParameterError("support_ball: radius must be >= 0");
  const Eigen::Index dim = center.size();
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::SupportBall{std::move(center), radius}, {}, dim}));
}

ConvexFunction ConvexFunction::separable_sum(std::vector<atom::Block> blocks) {
  if (blocks.empty()) throw DimensionError("separable_sum: no blocks");
  Eigen::Index next = 0;
  for (const auto& b : blocks) {
    require_positive(b.weight, "separable_sum weight");
    if (b.offset != next) throw ShapeError("separable_sum: blocks must tile the coordinates in order");
    next += b.fn.dim();
  }
  return ConvexFunction(std::make_shared<const Repr>(Repr{atom::SeparableSum{std::move(blocks)}, {}, next}));
}

ConvexFunction ConvexFunction::with(Transform t) const {
  Repr r = *repr_;
  r.transforms.push_back(std::move(t));
  return ConvexFunction(std::make_shared<const Repr>(std::move(r)));
}

ConvexFunction ConvexFunction::translated(Vector shift) const {
  require_finite(shift, "translate");
  require_dim(shift, dim(), "translate");
  return with(transform::Translate{std::move(shift)});
}

ConvexFunction ConvexFunction::scaled_arg(double factor) const {
  require_positive(factor, "scale_arg factor");
  return with(transform::ScaleArg{factor});
}

ConvexFunction ConvexFunction::scaled(double factor) const {
  require_positive(factor, "scale factor");
  return with(transform::ScaleVal{factor});
}

ConvexFunction ConvexFunction::plus_affine(Vector slope, double offset) const {
  require_finite(slope, "add_affine slope");
  require_dim(slope, dim(), "add_affine");
  if (!std::isfinite(offset)) throw ParameterError("add_affine: offset must be finite");
  return with(transform::AddAffine{std::move(slope), offset});
}

ConvexFunction ConvexFunction::plus_quadratic(double weight) const {
  if (!(weight >= 0) || !std::isfinite(weight)) throw ParameterError("add_quad weight must be >= 0");
  return with(transform::AddQuad{weight});
}

ConvexFunction ConvexFunction::moreau_envelope(double index) const {
  require_positive(index, "envelope index");
  return with(transform::Envelope{index});
}

Eigen::Index ConvexFunction::dim() const { return repr_->dim; }
const Atom& ConvexFunction::atom() const { return repr_->atom; }
const std::vector<Transform>& ConvexFunction::transforms() const { return repr_->transforms; }

namespace {
Impl impl_of(const ConvexFunction& f) { return Impl{f.atom(), f.transforms()}; }
}  // namespace

// ---------------------------------------------------------------------------
// public operations

ExtReal eval(const ConvexFunction& f, const Vector& x) {
  require_dim(x, f.dim(), "eval");
  const Impl im = impl_of(f);
  return ExtReal::from_double(im.eval(im.ts.size(), x, kMembershipTol));
}

Vector prox(const ConvexFunction& f, double gamma, const Vector& x) {
  require_gamma(gamma);
  require_dim(x, f.dim(), "prox");
  const Impl im = impl_of(f);
  return im.prox(im.ts.size(), gamma, x);
}

Vector prox_conjugate(const ConvexFunction& f, double gamma, const Vector& x) {
  require_gamma(gamma);
  require_dim(x, f.dim(), "prox_conjugate");
  const Impl im = impl_of(f);
  return im.prox_conj(im.ts.size(), gamma, x);
}

ExtReal conjugate_eval_closed(const ConvexFunction& f, const Vector& xstar) {
  require_dim(xstar, f.dim(), "conjugate_eval_closed");
  const Impl im = impl_of(f);
  return ExtReal::from_double(im.conj(im.ts.size(), xstar, kMembershipTol));
}

ExtReal recession_eval(const ConvexFunction& f, const Vector& x) {
  require_dim(x, f.dim(), "recession_eval");
  const Impl im = impl_of(f);
  return ExtReal::from_double(im.rec(im.ts.size(), x, kMembershipTol));
}

std::optional<double> lipschitz_bound(const ConvexFunction& f) {
  const Impl im = impl_of(f);
  return im.lip(im.ts.size());
}

bool domain_contains(const ConvexFunction& f, const Vector& x, double tol) {
  if (!(tol >= 0)) throw ParameterError("domain_contains: tol must be >= 0");
  require_dim(x, f.dim(), "domain_contains");
  const Impl im = impl_of(f);
  return im.eval(im.ts.size(), x, tol) < kInf;
}

bool has_full_domain(const ConvexFunction& f) {
  const Impl im = impl_of(f);
  return im.full_domain(im.ts.size());
}

namespace {
void put_vec(std::ostringstream& os, const Vector& v) {
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
}
void put_mat(std::ostringstream& os, const Matrix& m) {
  os << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i ? "," : "");
    put_vec(os, m.row(i).transpose());
  }
  os << ']';
}
void describe_into(std::ostringstream& os, const ConvexFunction& f) {
  std::visit(Overloaded{
                 [&](const atom::L1Norm& a) { os << "l1(" << a.dim << ')'; },
                 [&](const atom::EuclNorm& a) { os << "eucl(" << a.dim << ')'; },
                 [&](const atom::QuadForm& q) {
                   os << "quad(";
                   put_mat(os, q.a);
                   os << ')';
                 },
                 [&](const atom::Affine& a) {
                   os << "affine(";
                   put_vec(os, a.u);
                   os << ',' << a.alpha << ')';
                 },
                 [&](const atom::IndicatorBall& b) {
                   os << "iball(";
                   put_vec(os, b.center);
                   os << ',' << b.radius << ')';
                 },
                 [&](const atom::IndicatorSubspace& v) {
                   os << "isub(" << v.basis.rows() << ',';
                   put_mat(os, v.basis);
                   os << ')';
                 },
                 [&](const atom::DistBall& b) {
                   os << "dball(";
                   put_vec(os, b.center);
                   os << ',' << b.radius << ')';
                 },
                 [&](const atom::SupportBall& b) {
                   os << "sball(";
                   put_vec(os, b.center);
                   os << ',' << b.radius << ')';
                 },
                 [&](const atom::SeparableSum& s) {
                   os << "sum(";
                   for (std::size_t i = 0; i < s.blocks.size(); ++i) {
                     os << (i ? ";" : "") << s.blocks[i].weight << '*';
                     describe_into(os, s.blocks[i].fn);
                   }
                   os << ')';
                 },
             },
             f.atom());
  for (const auto& t : f.transforms()) {
    std::visit(Overloaded{
                   [&](const transform::Translate& t) {
                     os << "|tr";
                     put_vec(os, t.shift);
                   },
                   [&](const transform::ScaleArg& t) { os << "|sarg(" << t.factor << ')'; },
                   [&](const transform::ScaleVal& t) { os << "|sval(" << t.factor << ')'; },
                   [&](const transform::AddAffine& t) {
                     os << "|aff(";
                     put_vec(os, t.slope);
                     os << ',' << t.offset << ')';
                   },
                   [&](const transform::AddQuad& t) { os << "|quad(" << t.weight << ')'; },
                   [&](const transform::Envelope& t) { os << "|env(" << t.index << ')'; },
               },
               t);
  }
}
}  // namespace

std::string describe(const ConvexFunction& f) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  describe_into(os, f);
  return os.str();
}

}  // namespace proxkit
