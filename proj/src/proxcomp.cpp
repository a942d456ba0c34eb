#include "proxkit/proxcomp.hpp"

#include <cmath>
#include <limits>

#include "proxkit/detail/fista.hpp"
#include "proxkit/detail/parallel.hpp"
#include "proxkit/detail/solvers.hpp"

namespace proxkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_gamma(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive and finite");
}

// Orthonormal basis of ran L* and the pseudo-inverse of L*L.
struct FibreData {
  Matrix gram_pinv;
  Matrix adj_range;
  bool single_point;  // ker L* = {0}: every fibre is one point
};

FibreData fibre_data(const DenseMap& L) {
  const DenseMap gram(L.matrix().transpose() * L.matrix());
  PseudoInverse pi = pseudo_inverse_small(gram);
  return FibreData{pi.pinv.matrix(), pi.range_basis, pi.range_basis.cols() == L.rows()};
}

bool in_span(const Matrix& basis, const Vector& x) {
  const Vector p = basis.cols() ? Vector(basis * (basis.transpose() * x)) : Vector(Vector::Zero(x.size()));
  return (x - p).norm() <= 1e-9 * std::max(1.0, x.norm());
}

// Distance from x to L*(dom g), by projected gradient from y0. The projection
// onto dom g is the prox of a vanishing multiple of g.
double fibre_gap(const Matrix& l, const ConvexFunction& g, const Vector& x, const Vector& y0, double norm,
                 const SolverOpts& opts) {
  auto grad = [&](const Vector& y) -> Vector { return l * (l.transpose() * y - x); };
  auto project = [&](const Vector& v, double) -> Vector { return prox(g, 1e-12, v); };
  auto objective = [&](const Vector& y) { return 0.5 * (l.transpose() * y - x).squaredNorm(); };
  auto residual = [](const Vector& w, const Vector&, const Vector& y, double t) { return (w - y).norm() / t; };
  const detail::FistaResult fr =
      detail::fista(project(y0, 0.0), 1.0 / (norm * norm), -1.0, grad, project, objective, residual, opts);
  return (l.transpose() * fr.y - x).norm();
}

}  // namespace

struct CompositionSpec::Cache {
  double norm;
  detail::GramSpectrum spectrum;
  FibreData fibre;
};

bool admissible(const DenseMap& L) {
  const double n = operator_norm(L);
  return n > 0 && n <= 1.0 + kAdmissibilityTol;
}

CompositionSpec::CompositionSpec(DenseMap L, ConvexFunction g, double gamma)
    : op_(std::move(L)), fn_(std::move(g)), gamma_(gamma) {
  require_gamma(gamma_);
  if (op_.rows() != fn_.dim()) throw DimensionError("CompositionSpec: codomain of L differs from dim g");
  const double n = operator_norm(op_);
  if (!(n > 0) || n > 1.0 + kAdmissibilityTol) {
    throw AdmissibilityError("CompositionSpec: operator norm must lie in (0, 1], got " + std::to_string(n));
  }
  op_ = op_.certified();
  cache_ = std::make_shared<const Cache>(Cache{n, detail::GramSpectrum::of(op_.matrix()), fibre_data(op_)});
}

CompositionSpec::CompositionSpec(DenseMap L, ConvexFunction g, double gamma, std::shared_ptr<const Cache> cache)
    : op_(std::move(L)), fn_(std::move(g)), gamma_(gamma), cache_(std::move(cache)) {
  require_gamma(gamma_);
  if (op_.rows() != fn_.dim()) throw DimensionError("CompositionSpec: codomain of L differs from dim g");
}

double CompositionSpec::op_norm() const { return cache_->norm; }

CompositionSpec CompositionSpec::with_gamma(double gamma) const { return CompositionSpec(op_, fn_, gamma, cache_); }

CompositionSpec CompositionSpec::with_fn(ConvexFunction g) const {
  return CompositionSpec(op_, std::move(g), gamma_, cache_);
}

SolveReport eval_cocomposition(const CompositionSpec& spec, const Vector& x, const SolverOpts& opts) {
  require_dim(x, spec.op().cols(), "eval_cocomposition");
  const double gamma = spec.gamma();
  const Vector b = apply(spec.op(), x);
  const detail::DualQuadratic problem{spec.fn(), spec.op().matrix(), spec.cache().spectrum, gamma, gamma, b};
  const Vector y0 = prox_conjugate(spec.fn(), 1.0 / gamma, b / gamma);
  return detail::solve_dual_quadratic(problem, y0, opts);
}

SolveReport eval_composition(const CompositionSpec& spec, const Vector& x, const SolverOpts& opts) {
  require_dim(x, spec.op().cols(), "eval_composition");
  const double gamma = spec.gamma();
  const Matrix& l = spec.op().matrix();
  const ConvexFunction& g = spec.fn();
  const FibreData& fibre = spec.cache().fibre;
  const double offset = x.squaredNorm() / (2.0 * gamma);

  SolveReport rep;
  if (!in_span(fibre.adj_range, x)) {
    // L*(dom g) lies inside ran L*, so x has no preimage at all.
    rep.status = SolveStatus::Diverged;
    rep.value = ExtReal::plus_infinity();
    return rep;
  }

  if (fibre.single_point) {
    const Vector y = l * (fibre.gram_pinv * x);
    const double gy = eval(g, y).as_double();
    rep.status = SolveStatus::Converged;
    rep.iterations = 0;
    rep.residual = 0.0;
    rep.value = std::isfinite(gy) ? ExtReal::finite(gy + y.squaredNorm() / (2.0 * gamma) - offset)
                                  : ExtReal::plus_infinity();
    rep.argpoint = y;
    return rep;
  }

  detail::SmoothConjugate problem;
  // h = envelope of g* with index 1/gamma, composed with L, written through g.
  problem.h = [&](const Vector& z, Vector& grad) {
    const Vector w = l * z;
    const Vector y = prox(g, gamma, gamma * w);
    grad = l.transpose() * y;
    const double env = eval(g, y).value() + (gamma * w - y).squaredNorm() / (2.0 * gamma);
    return 0.5 * gamma * w.squaredNorm() - env;
  };
  // Feasible point of the fibre problem built from the current dual iterate.
  problem.upper_bound = [&](const Vector& z) {
    const Vector y = prox(g, gamma, gamma * (l * z));
    const Vector yf = y + l * (fibre.gram_pinv * (x - l.transpose() * y));
    const double gy = eval(g, yf).as_double();
    if (!std::isfinite(gy)) return kInf;
    return gy + yf.squaredNorm() / (2.0 * gamma);
  };
  problem.lipschitz = gamma * spec.op_norm() * spec.op_norm();
  problem.x = x;
  rep = detail::solve_smooth_conjugate(problem, Vector::Zero(x.size()), opts);
  if (rep.status == SolveStatus::MaxIter && rep.value.is_finite() && rep.argpoint && !has_full_domain(g)) {
    // A stalled dual with a growing iterate is also what an empty fibre looks like.
    const Vector y = prox(g, gamma, gamma * (l * *rep.argpoint));
    if (fibre_gap(l, g, x, y, spec.op_norm(), opts) > 1e-6 * std::max(1.0, x.norm())) {
      rep.status = SolveStatus::Diverged;
      rep.value = ExtReal::plus_infinity();
      return rep;
    }
  }
  if (rep.value.is_finite()) rep.value = ExtReal::finite(rep.value.value() - offset);
  return rep;
}

Vector prox_composition(const CompositionSpec& spec, const Vector& x) {
  const Vector lx = apply(spec.op(), x);
  return adjoint_apply(spec.op(), prox(spec.fn(), spec.gamma(), lx));
}

Vector prox_cocomposition(const CompositionSpec& spec, const Vector& x) {
  const Vector lx = apply(spec.op(), x);
  return x - adjoint_apply(spec.op(), lx - prox(spec.fn(), spec.gamma(), lx));
}

double envelope_cocomposition(const CompositionSpec& spec, double rho, const Vector& x, const SolverOpts& opts) {
  if (!(rho > 0) || !std::isfinite(rho)) throw ParameterError("envelope_cocomposition: rho must be positive");
  require_dim(x, spec.op().cols(), "envelope_cocomposition");
  const double gamma = spec.gamma();
  if (rho == gamma) return envelope(spec.fn(), gamma, apply(spec.op(), x));
  SolveReport rep;
  if (rho < gamma) {
    // envelope of index rho of the cocomposition with parameter gamma equals the
    // cocomposition with parameter gamma - rho of the rho-envelope of g
    const CompositionSpec inner = spec.with_fn(spec.fn().moreau_envelope(rho)).with_gamma(gamma - rho);
    rep = eval_cocomposition(inner, x, opts);
  } else {
    // Exchanging inf and sup in the envelope of the dual form gives the same
    // dual problem with M = gamma Id + (rho - gamma) L L*.
    const Vector b = apply(spec.op(), x);
    const detail::DualQuadratic problem{spec.fn(), spec.op().matrix(), spec.cache().spectrum, gamma, gamma - rho, b};
    rep = detail::solve_dual_quadratic(problem, prox_conjugate(spec.fn(), 1.0 / rho, b / rho), opts);
  }
  if (!rep.value.is_finite()) throw ParameterError("envelope_cocomposition: solver did not return a finite value");
  return rep.value.value();
}

SubgradientWitness subgradient_witness_cocomposition(const CompositionSpec& spec, const Vector& x) {
  Vector p = prox_cocomposition(spec, x);
  Vector s = (x - p) / spec.gamma();
  return {std::move(p), std::move(s)};
}

ExtReal recession_cocomposition(const CompositionSpec& spec, const Vector& x) {
  return recession_eval(spec.fn(), apply(spec.op(), x));
}

ExtReal perspective_cocomposition(const CompositionSpec& spec, const Vector& x, double xi, const SolverOpts& opts) {
  require_dim(x, spec.op().cols(), "perspective_cocomposition");
  if (std::isnan(xi)) throw ParameterError("perspective_cocomposition: xi is NaN");
  if (xi < 0) return ExtReal::plus_infinity();
  if (xi == 0) return recession_cocomposition(spec, x);
  const SolveReport rep = eval_cocomposition(spec, x / xi, opts);
  return xi * rep.value;
}

SweepReport gamma_sweep(const DenseMap& L, const ConvexFunction& g, const Vector& x, const std::vector<double>& gammas,
                        const SolverOpts& opts, double slack) {
  if (gammas.empty()) throw ParameterError("gamma_sweep: empty gamma list");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    require_gamma(gammas[i]);
    if (i > 0 && !(gammas[i] > gammas[i - 1])) throw ParameterError("gamma_sweep: gammas must increase strictly");
  }
  const CompositionSpec base(L, g, gammas.front());
  SweepReport rep;
  rep.rows.resize(gammas.size());
  detail::parallel_for(gammas.size(), [&](std::size_t i) {
    const CompositionSpec s = base.with_gamma(gammas[i]);
    rep.rows[i] = SweepRow{gammas[i], eval_composition(s, x, opts), eval_cocomposition(s, x, opts)};
  });
  rep.composition_monotone = true;
  rep.cocomposition_monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double c0 = rep.rows[i - 1].composition.value.as_double();
    const double c1 = rep.rows[i].composition.value.as_double();
    if (!(c1 <= c0 + slack) && !(std::isinf(c0) && std::isinf(c1))) rep.composition_monotone = false;
    const double d0 = rep.rows[i - 1].cocomposition.value.as_double();
    const double d1 = rep.rows[i].cocomposition.value.as_double();
    if (!(d1 <= d0 + slack) && !(std::isinf(d0) && std::isinf(d1))) rep.cocomposition_monotone = false;
  }
  return rep;
}

SmallGammaReport limit_small_gamma(const DenseMap& L, const ConvexFunction& g, const Vector& x,
                                   const std::vector<double>& gammas, const SolverOpts& opts, double tol) {
  if (gammas.empty()) throw ParameterError("limit_small_gamma: empty gamma list");
  const ExtReal target = eval(g, apply(L, x));
  if (target.is_infinite()) throw ParameterError("limit_small_gamma: Lx outside dom g");
  const std::optional<double> beta = lipschitz_bound(g);
  const CompositionSpec base(L, g, gammas.front());
  SmallGammaReport rep;
  rep.target = target.value();
  rep.rows.resize(gammas.size());
  detail::parallel_for(gammas.size(), [&](std::size_t i) {
    require_gamma(gammas[i]);
    const SolveReport r = eval_cocomposition(base.with_gamma(gammas[i]), x, opts);
    SmallGammaRow row{gammas[i], r.value.as_double(), rep.target - r.value.as_double(), std::nullopt, false};
    if (beta) row.bound = gammas[i] * *beta * *beta / 2.0;
    row.within = row.gap >= -tol && (!row.bound || row.gap <= *row.bound + tol);
    rep.rows[i] = row;
  });
  rep.all_within = true;
  for (const auto& r : rep.rows) rep.all_within = rep.all_within && r.within;
  return rep;
}

double infimal_postcomposition(const DenseMap& L, const ConvexFunction& g, const Vector& x, const SolverOpts& opts) {
  require_dim(x, L.cols(), "infimal_postcomposition");
  if (L.rows() != g.dim()) throw DimensionError("infimal_postcomposition: codomain of L differs from dim g");
  const FibreData fibre = fibre_data(L);
  if (!in_span(fibre.adj_range, x)) return kInf;
  const Vector anchor = L.matrix() * (fibre.gram_pinv * x);
  const detail::GramSpectrum sp = detail::GramSpectrum::of(L.matrix());
  const double cut = 1e-10 * std::max(1.0, sp.lam.maxCoeff());
  const Matrix kernel = sp.basis_where([cut](double l) { return l <= cut; });
  return detail::minimize_over_affine(g, anchor, kernel, opts).value;
}

LargeGammaReport limit_large_gamma(const DenseMap& L, const ConvexFunction& g, const Vector& x,
                                   const std::vector<double>& gammas, const SolverOpts& opts) {
  LargeGammaReport rep;
  rep.sweep = gamma_sweep(L, g, x, gammas, opts);
  rep.composition_target = infimal_postcomposition(L, g, x, opts);
  const double norm = operator_norm(L);
  const detail::GramSpectrum sp = detail::GramSpectrum::of(L.matrix());
  if (norm < 1.0 - kAdmissibilityTol) {
    rep.which = LargeGammaCase::NormBelowOne;
    const Eigen::Index m = g.dim();
    rep.cocomposition_target =
        detail::minimize_over_affine(g, Vector::Zero(m), Matrix::Identity(m, m), opts).value;
  } else {
    rep.which = LargeGammaCase::NormOne;
    // ran(Id - L L*) is spanned by eigenvectors of L L* with eigenvalue below 1.
    const Matrix v = sp.basis_where([](double l) { return l < 1.0 - kAdmissibilityTol; });
    rep.cocomposition_target = detail::minimize_over_affine(g, apply(L, x), v, opts).value;
  }
  const SweepRow& last = rep.sweep.rows.back();
  rep.composition_tail_gap = last.composition.value.as_double() - rep.composition_target;
  rep.cocomposition_tail_gap = last.cocomposition.value.as_double() - rep.cocomposition_target;
  return rep;
}

SolveReport argmin_cocomposition(const CompositionSpec& spec, const Vector& x0, const SolverOpts& opts) {
  require_dim(x0, spec.op().cols(), "argmin_cocomposition");
  const Matrix& l = spec.op().matrix();
  const ConvexFunction& g = spec.fn();
  const double gamma = spec.gamma();
  detail::SmoothMin problem;
  problem.f = [&](const Vector& x, Vector& grad) {
    const Vector w = l * x;
    const Vector p = prox(g, gamma, w);
    grad = l.transpose() * (w - p) / gamma;
    return eval(g, p).value() + (w - p).squaredNorm() / (2.0 * gamma);
  };
  problem.lipschitz = spec.op_norm() * spec.op_norm() / gamma;
  return detail::minimize_smooth(problem, x0, opts);
}

SolveReport argmin_cocomposition(const CompositionSpec& spec, const SolverOpts& opts) {
  return argmin_cocomposition(spec, Vector::Zero(spec.op().cols()), opts);
}

ArgminSequenceReport argmin_sequence(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                                     const SolverOpts& opts, double slack) {
  if (gammas.empty()) throw ParameterError("argmin_sequence: empty gamma list");
  const CompositionSpec base(L, g, gammas.front());
  ArgminSequenceReport rep;
  Vector x = Vector::Zero(L.cols());
  for (double gamma : gammas) {
    SolveReport r = argmin_cocomposition(base.with_gamma(gamma), x, opts);
    if (r.argpoint) x = *r.argpoint;
    rep.rows.push_back({gamma, std::move(r)});
  }
  const SolveReport ref = argmin_cocomposition(base.with_gamma(std::ldexp(1.0, -20)), x, opts);
  rep.reference = ref.argpoint ? eval(g, apply(L, *ref.argpoint)).as_double() : kInf;
  rep.nondecreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const bool decreasing_gamma = rep.rows[i].gamma < rep.rows[i - 1].gamma;
    const double prev = rep.rows[i - 1].report.value.as_double();
    const double cur = rep.rows[i].report.value.as_double();
    if (decreasing_gamma && cur < prev - slack) rep.nondecreasing = false;
  }
  return rep;
}

Proximable proximable(const ConvexFunction& g, double gamma) {
  require_gamma(gamma);
  return Proximable{g.dim(), gamma, [g](const Vector& x) { return eval(g, x).as_double(); },
                    [g, gamma](const Vector& x) { return prox(g, gamma, x); }};
}

Proximable proximable_cocomposition(const CompositionSpec& spec, const SolverOpts& opts) {
  return Proximable{spec.op().cols(), spec.gamma(),
                    [spec, opts](const Vector& x) { return eval_cocomposition(spec, x, opts).value.as_double(); },
                    [spec](const Vector& x) { return prox_cocomposition(spec, x); }};
}

SolveReport eval_cocomposition_splitting(const DenseMap& S, const Proximable& f, const Vector& x,
                                         const SolverOpts& opts) {
  require_dim(x, S.cols(), "eval_cocomposition_splitting");
  if (S.rows() != f.dim) throw DimensionError("eval_cocomposition_splitting: codomain of S differs from dim f");
  const double norm = operator_norm(S);
  if (!(norm > 0) || norm >= 1.0) throw AdmissibilityError("eval_cocomposition_splitting: needs 0 < ||S|| < 1");
  const double gamma = f.gamma;
  const Eigen::Index m = S.rows();
  const Matrix id = Matrix::Identity(m, m);
  // q(w) = <c - w, A (c - w)> / (2 gamma) with A = (Id - S S*)^{-1}
  const Matrix a = (id - S.matrix() * S.matrix().transpose()).inverse();
  const Eigen::LDLT<Matrix> shifted(a + id);
  const Vector c = apply(S, x);
  const Vector ac = a * c;
  auto prox_q = [&](const Vector& v) -> Vector { return shifted.solve(ac + v); };
  auto q = [&](const Vector& w) { return (c - w).dot(a * (c - w)) / (2.0 * gamma); };

  SolveReport rep;
  Vector z = c;
  Vector w = prox_q(z);
  for (int it = 1; it <= opts.max_iter; ++it) {
    w = prox_q(z);
    const Vector dz = f.prox(2.0 * w - z) - w;
    z += dz;
    rep.iterations = it;
    rep.residual = dz.norm();
    if (rep.residual <= opts.tol) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  // The prox step lands in dom f; the q step only approaches it.
  w = prox_q(z);
  const Vector u = f.prox(2.0 * w - z);
  const double fu = f.value(u);
  rep.value = ExtReal::from_double(std::isnan(fu) ? kInf : fu + q(u));
  rep.argpoint = u;
  return rep;
}

}  // namespace proxkit
