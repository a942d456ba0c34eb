#include "proxkit/mixture.hpp"

#include <cmath>
#include <limits>

#include "proxkit/detail/fista.hpp"
#include "proxkit/detail/parallel.hpp"
#include "proxkit/detail/solvers.hpp"

namespace proxkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double relative(double gap, double value) { return gap / std::max(1.0, std::abs(value)); }

void require_gamma(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive and finite");
}

}  // namespace

struct MixtureSpec::Cache {
  double budget;
  Eigen::Index stacked_dim;
  std::vector<Eigen::Index> offsets;
  DirectSumEmbedding embedding;
  // pseudo-inverse of sum alpha_k L_k^* L_k and an orthonormal basis of its range
  Matrix gram_pinv;
  Matrix range_basis;
};

namespace {
using Shared = MixtureSpec::Cache;

std::shared_ptr<const Shared> make_cache(const std::vector<MixtureTerm>& terms) {
  if (terms.empty()) throw ParameterError("MixtureSpec: no terms");
  const Eigen::Index n = terms.front().op.cols();
  struct {
    double budget = 0.0;
    Eigen::Index stacked_dim = 0;
    std::vector<Eigen::Index> offsets;
  } acc;
  Matrix gram = Matrix::Zero(n, n);
  std::vector<atom::Block> blocks;
  for (const MixtureTerm& t : terms) {
    if (!(t.alpha > 0) || !std::isfinite(t.alpha)) throw ParameterError("MixtureSpec: weights must be positive");
    if (t.op.cols() != n) throw DimensionError("MixtureSpec: operators must share their domain");
    if (t.op.rows() != t.fn.dim()) throw DimensionError("MixtureSpec: codomain of L_k differs from dim g_k");
    const double bound = t.op.norm_bound() ? *t.op.norm_bound() : *t.op.certified().norm_bound();
    acc.budget += t.alpha * bound * bound;
    acc.offsets.push_back(acc.stacked_dim);
    const double r = std::sqrt(t.alpha);
    blocks.push_back(atom::Block{t.alpha, t.fn.scaled_arg(1.0 / r), acc.stacked_dim});
    acc.stacked_dim += t.op.rows();
    gram += t.alpha * t.op.matrix().transpose() * t.op.matrix();
  }
  if (!(acc.budget > 0) || acc.budget > 1.0 + kAdmissibilityTol) {
    throw AdmissibilityError("MixtureSpec: sum of alpha_k ||L_k||^2 must lie in (0, 1], got " +
                             std::to_string(acc.budget));
  }
  Matrix stacked(acc.stacked_dim, n);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    stacked.middleRows(acc.offsets[k], terms[k].op.rows()) = std::sqrt(terms[k].alpha) * terms[k].op.matrix();
  }
  const PseudoInverse pi = pseudo_inverse_small(DenseMap(0.5 * (gram + gram.transpose())));
  return std::make_shared<const Shared>(
      Shared{acc.budget, acc.stacked_dim, acc.offsets,
             DirectSumEmbedding{DenseMap(stacked), ConvexFunction::separable_sum(std::move(blocks))},
             pi.pinv.matrix(), pi.range_basis});
}

bool in_span(const Matrix& basis, const Vector& x) {
  const Vector p = basis.cols() ? Vector(basis * (basis.transpose() * x)) : Vector(Vector::Zero(x.size()));
  return (x - p).norm() <= 1e-9 * std::max(1.0, x.norm());
}

// Member of a weighted family seen through f and its conjugate; the conjugated
// view swaps the two.
struct Member {
  double alpha;
  const Matrix* l;
  std::function<double(const Vector&)> f;
  std::function<double(const Vector&)> fstar;
  std::function<Vector(double, const Vector&)> prox_f;
  std::function<Vector(double, const Vector&)> prox_fstar;
};

std::vector<Member> members(const MixtureSpec& spec, bool conjugated) {
  std::vector<Member> out;
  for (const MixtureTerm& t : spec.terms()) {
    const ConvexFunction g = t.fn;
    auto val = [g](const Vector& y) { return eval(g, y).as_double(); };
    auto cval = [g](const Vector& y) { return conjugate_eval_closed(g, y).as_double(); };
    auto px = [g](double s, const Vector& y) { return prox(g, s, y); };
    auto cpx = [g](double s, const Vector& y) { return prox_conjugate(g, s, y); };
    if (conjugated) {
      out.push_back(Member{t.alpha, &t.op.matrix(), cval, val, cpx, px});
    } else {
      out.push_back(Member{t.alpha, &t.op.matrix(), val, cval, px, cpx});
    }
  }
  return out;
}

// h^*(x) - ||x||^2 / (2c) with h(z) = sum alpha_k env_{1/c}(f_k^*)(L_k z).
SolveReport weighted_mixture(const std::vector<Member>& ms, const Shared& sh, double c, const Vector& x,
                             const SolverOpts& opts) {
  SolveReport rep;
  if (!in_span(sh.range_basis, x)) {
    rep.status = SolveStatus::Diverged;
    rep.value = ExtReal::plus_infinity();
    return rep;
  }
  detail::SmoothConjugate problem;
  problem.h = [&](const Vector& z, Vector& grad) {
    grad = Vector::Zero(z.size());
    double val = 0.0;
    for (const Member& m : ms) {
      const Vector w = *m.l * z;
      const Vector p = m.prox_f(c, c * w);
      const double env = m.f(p) + (c * w - p).squaredNorm() / (2.0 * c);
      val += m.alpha * (0.5 * c * w.squaredNorm() - env);
      grad += m.alpha * (m.l->transpose() * p);
    }
    return val;
  };
  // Feasible family for the weighted fibre sum alpha_k L_k^* y_k = x.
  problem.upper_bound = [&](const Vector& z) {
    std::vector<Vector> ys;
    Vector r = x;
    for (const Member& m : ms) {
      ys.push_back(m.prox_f(c, c * (*m.l * z)));
      r -= m.alpha * (m.l->transpose() * ys.back());
    }
    const Vector d = sh.gram_pinv * r;
    double ub = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const Vector y = ys[k] + *ms[k].l * d;
      const double fy = ms[k].f(y);
      if (!std::isfinite(fy)) return kInf;
      ub += ms[k].alpha * (fy + y.squaredNorm() / (2.0 * c));
    }
    return ub;
  };
  problem.lipschitz = c * sh.budget;
  problem.x = x;
  rep = detail::solve_smooth_conjugate(problem, Vector::Zero(x.size()), opts);
  if (rep.value.is_finite()) rep.value = ExtReal::finite(rep.value.value() - x.squaredNorm() / (2.0 * c));
  return rep;
}

// sup_y sum alpha_k (<L_k x, y_k> - f_k^*(y_k) - c ||y_k||^2 / 2) + c ||sum alpha_k L_k^* y_k||^2 / 2,
// by proximal gradient in the weighted metric.
SolveReport weighted_comixture(const std::vector<Member>& ms, const Shared& sh, double c, const Vector& x,
                               const SolverOpts& opts) {
  const std::vector<Eigen::Index>& off = sh.offsets;
  auto block = [&](const Vector& y, std::size_t k) { return y.segment(off[k], ms[k].l->rows()); };
  std::vector<Vector> b;
  for (const Member& m : ms) b.push_back(*m.l * x);
  auto adj_sum = [&](const Vector& y) {
    Vector s = Vector::Zero(x.size());
    for (std::size_t k = 0; k < ms.size(); ++k) s += ms[k].alpha * (ms[k].l->transpose() * block(y, k));
    return s;
  };
  auto dual_value = [&](const Vector& y) {
    double d = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const Vector yk = block(y, k);
      d += ms[k].alpha * (b[k].dot(yk) - ms[k].fstar(yk) - 0.5 * c * yk.squaredNorm());
    }
    return d + 0.5 * c * adj_sum(y).squaredNorm();
  };
  auto weighted_norm = [&](const Vector& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) s += ms[k].alpha * block(y, k).squaredNorm();
    return std::sqrt(s);
  };
  auto grad = [&](const Vector& w) {
    const Vector s = adj_sum(w);
    Vector gr(w.size());
    for (std::size_t k = 0; k < ms.size(); ++k) {
      gr.segment(off[k], ms[k].l->rows()) = c * block(w, k) - c * (*ms[k].l * s) - b[k];
    }
    return gr;
  };
  auto proxf = [&](const Vector& v, double t) {
    Vector y(v.size());
    for (std::size_t k = 0; k < ms.size(); ++k) y.segment(off[k], ms[k].l->rows()) = ms[k].prox_fstar(t, block(v, k));
    return y;
  };
  auto objective = [&](const Vector& y) { return -dual_value(y); };
  auto residual = [&](const Vector& w, const Vector&, const Vector& y, double t) {
    const double d = dual_value(y);
    if (std::isfinite(d)) {
      // z = b - M y; the weighted Fenchel-Young gap of f at (z, y) bounds the duality gap.
      const Vector s = adj_sum(y);
      double gap = 0.0;
      for (std::size_t k = 0; k < ms.size() && std::isfinite(gap); ++k) {
        const Vector yk = block(y, k);
        const Vector z = b[k] - c * yk + c * (*ms[k].l * s);
        gap += ms[k].alpha * (ms[k].f(z) + ms[k].fstar(yk) - z.dot(yk));
      }
      if (std::isfinite(gap)) return relative(std::max(gap, 0.0), d);
    }
    return weighted_norm(w - y) / t;
  };
  Vector y0(sh.stacked_dim);
  for (std::size_t k = 0; k < ms.size(); ++k) y0.segment(off[k], ms[k].l->rows()) = ms[k].prox_fstar(1.0 / c, b[k] / c);
  const double kappa = 1.0 - sh.budget;
  const double momentum = kappa > 1e-12 ? (1.0 - std::sqrt(kappa)) / (1.0 + std::sqrt(kappa)) : -1.0;
  detail::FistaResult fr = detail::fista(y0, 1.0 / c, momentum, grad, proxf, objective, residual, opts);
  SolveReport rep;
  rep.iterations = fr.iterations;
  rep.residual = fr.residual;
  rep.status = fr.status;
  if (fr.status == SolveStatus::Diverged) {
    rep.value = ExtReal::plus_infinity();
    return rep;
  }
  const double d = dual_value(fr.y);
  rep.value = ExtReal::from_double(std::isnan(d) ? kInf : d);
  rep.argpoint = std::move(fr.y);
  return rep;
}

MixtureEval combine(SolveReport direct, SolveReport defining) {
  const double a = direct.value.as_double();
  const double b = defining.value.as_double();
  const double disc = std::isfinite(a) && std::isfinite(b) ? std::abs(a - b) : kInf;
  return MixtureEval{std::move(direct), std::move(defining), disc};
}

}  // namespace

MixtureSpec::MixtureSpec(std::vector<MixtureTerm> terms, double gamma)
    : MixtureSpec(terms, gamma, make_cache(terms)) {}

MixtureSpec::MixtureSpec(std::vector<MixtureTerm> terms, double gamma, std::shared_ptr<const Cache> cache)
    : terms_(std::move(terms)),
      gamma_(gamma),
      cache_(std::move(cache)),
      embedded_(cache_->embedding.stacked_map, cache_->embedding.stacked_fun, gamma) {
  require_gamma(gamma_);
}

Eigen::Index MixtureSpec::stacked_dim() const { return cache_->stacked_dim; }
double MixtureSpec::budget() const { return cache_->budget; }

MixtureSpec MixtureSpec::with_gamma(double gamma) const { return MixtureSpec(terms_, gamma, cache_); }

DirectSumEmbedding embed(const MixtureSpec& spec) { return spec.cache().embedding; }

MixtureEval mixture_eval(const MixtureSpec& spec, const Vector& x, const SolverOpts& opts) {
  require_dim(x, spec.dim(), "mixture_eval");
  return combine(eval_composition(spec.embedded(), x, opts),
                 weighted_mixture(members(spec, false), spec.cache(), spec.gamma(), x, opts));
}

MixtureEval comixture_eval(const MixtureSpec& spec, const Vector& x, const SolverOpts& opts) {
  require_dim(x, spec.dim(), "comixture_eval");
  return combine(eval_cocomposition(spec.embedded(), x, opts),
                 weighted_comixture(members(spec, false), spec.cache(), spec.gamma(), x, opts));
}

SolveReport mixture_conjugate_eval(const MixtureSpec& spec, const Vector& u, const SolverOpts& opts) {
  require_dim(u, spec.dim(), "mixture_conjugate_eval");
  return weighted_comixture(members(spec, true), spec.cache(), 1.0 / spec.gamma(), u, opts);
}

SolveReport comixture_conjugate_eval(const MixtureSpec& spec, const Vector& u, const SolverOpts& opts) {
  require_dim(u, spec.dim(), "comixture_conjugate_eval");
  return weighted_mixture(members(spec, true), spec.cache(), 1.0 / spec.gamma(), u, opts);
}

Vector mixture_prox(const MixtureSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "mixture_prox");
  Vector out = Vector::Zero(x.size());
  for (const MixtureTerm& t : spec.terms()) {
    out += t.alpha * adjoint_apply(t.op, prox(t.fn, spec.gamma(), apply(t.op, x)));
  }
  return out;
}

Vector comixture_prox(const MixtureSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "comixture_prox");
  Vector out = x;
  for (const MixtureTerm& t : spec.terms()) {
    const Vector lx = apply(t.op, x);
    out -= t.alpha * adjoint_apply(t.op, lx - prox(t.fn, spec.gamma(), lx));
  }
  return out;
}

double comixture_envelope(const MixtureSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "comixture_envelope");
  double s = 0.0;
  for (const MixtureTerm& t : spec.terms()) s += t.alpha * envelope(t.fn, spec.gamma(), apply(t.op, x));
  return s;
}

ExtReal comixture_recession(const MixtureSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "comixture_recession");
  ExtReal s = ExtReal::finite(0.0);
  for (const MixtureTerm& t : spec.terms()) s = s + t.alpha * recession_eval(t.fn, apply(t.op, x));
  return s;
}

SolveReport comixture_argmin(const MixtureSpec& spec, const Vector& x0, const SolverOpts& opts) {
  require_dim(x0, spec.dim(), "comixture_argmin");
  const double gamma = spec.gamma();
  detail::SmoothMin problem;
  problem.f = [&](const Vector& x, Vector& grad) {
    grad = Vector::Zero(x.size());
    double val = 0.0;
    for (const MixtureTerm& t : spec.terms()) {
      const Vector w = t.op.matrix() * x;
      const Vector p = prox(t.fn, gamma, w);
      grad += t.alpha * (t.op.matrix().transpose() * (w - p)) / gamma;
      val += t.alpha * (eval(t.fn, p).value() + (w - p).squaredNorm() / (2.0 * gamma));
    }
    return val;
  };
  problem.lipschitz = spec.budget() / gamma;
  return detail::minimize_smooth(problem, x0, opts);
}

SolveReport comixture_argmin(const MixtureSpec& spec, const SolverOpts& opts) {
  return comixture_argmin(spec, Vector::Zero(spec.dim()), opts);
}

ComixtureArgminSequence comixture_argmin_sequence(const MixtureSpec& spec, const std::vector<double>& gammas,
                                                  const SolverOpts& opts, double slack) {
  if (gammas.empty()) throw ParameterError("comixture_argmin_sequence: empty gamma list");
  ComixtureArgminSequence rep;
  Vector x = Vector::Zero(spec.dim());
  for (double gamma : gammas) {
    SolveReport r = comixture_argmin(spec.with_gamma(gamma), x, opts);
    if (r.argpoint) x = *r.argpoint;
    rep.rows.push_back({gamma, std::move(r)});
  }
  const SolveReport ref = comixture_argmin(spec.with_gamma(std::ldexp(1.0, -20)), x, opts);
  rep.reference = 0.0;
  if (!ref.argpoint) {
    rep.reference = kInf;
  } else {
    for (const MixtureTerm& t : spec.terms()) rep.reference += t.alpha * eval(t.fn, apply(t.op, *ref.argpoint)).as_double();
  }
  rep.nondecreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const bool decreasing_gamma = rep.rows[i].gamma < rep.rows[i - 1].gamma;
    const double prev = rep.rows[i - 1].report.value.as_double();
    const double cur = rep.rows[i].report.value.as_double();
    if (decreasing_gamma && cur < prev - slack) rep.nondecreasing = false;
  }
  return rep;
}

PcmReport pcm_estimate(const MixtureSpec& spec, const Vector& x, const std::vector<double>& gamma_tail,
                       const SolverOpts& opts, std::optional<GridSpec> oracle_grid) {
  require_dim(x, spec.dim(), "pcm_estimate");
  if (gamma_tail.empty()) throw ParameterError("pcm_estimate: empty gamma list");
  for (std::size_t i = 0; i < gamma_tail.size(); ++i) {
    require_gamma(gamma_tail[i]);
    if (i > 0 && !(gamma_tail[i] > gamma_tail[i - 1])) throw ParameterError("pcm_estimate: gammas must increase");
  }
  if (oracle_grid && spec.stacked_dim() > 2) throw UnsupportedDimension("pcm_estimate: grid oracle needs stacked dim <= 2");
  PcmReport rep;
  rep.tail.resize(gamma_tail.size());
  detail::parallel_for(gamma_tail.size(), [&](std::size_t i) {
    rep.tail[i] = PcmRow{gamma_tail[i], mixture_eval(spec.with_gamma(gamma_tail[i]), x, opts).direct_sum};
  });
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.tail.size(); ++i) {
    const double a = rep.tail[i - 1].mixture.value.as_double();
    const double b = rep.tail[i].mixture.value.as_double();
    if (!(b <= a + 1e-7) && !(std::isinf(a) && std::isinf(b))) rep.monotone = false;
  }
  if (oracle_grid) {
    const Eigen::Index m = spec.stacked_dim();
    const std::vector<Eigen::Index>& off = spec.cache().offsets;
    Matrix op(m, spec.dim());
    for (std::size_t k = 0; k < spec.terms().size(); ++k) {
      const MixtureTerm& t = spec.terms()[k];
      op.middleRows(off[k], t.op.rows()) = t.alpha * t.op.matrix();
    }
    GridProblem gp;
    gp.dim = m;
    gp.point = x;
    gp.op = DenseMap(op);
    gp.constraint_tol = oracle_grid->step() * op.norm();
    gp.f = [&spec, &off](const Vector& y) {
      double s = 0.0;
      for (std::size_t k = 0; k < spec.terms().size(); ++k) {
        const MixtureTerm& t = spec.terms()[k];
        s += t.alpha * eval(t.fn, y.segment(off[k], t.op.rows())).as_double();
      }
      return s;
    };
    rep.oracle = grid_oracle(GridKind::ConstrainedMin, gp, *oracle_grid);
    rep.gap = rep.tail.back().mixture.value.as_double() - rep.oracle->value;
  }
  return rep;
}

SolveReport proximal_average_eval(const std::vector<double>& weights, const std::vector<Proximable>& family,
                                  const Vector& x, const SolverOpts& opts) {
  if (family.empty() || weights.size() != family.size()) {
    throw ParameterError("proximal_average_eval: need one weight per function");
  }
  const double c = family.front().gamma;
  double total = 0.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!(weights[k] > 0)) throw ParameterError("proximal_average_eval: weights must be positive");
    if (family[k].gamma != c) throw ParameterError("proximal_average_eval: functions must share gamma");
    if (family[k].dim != x.size()) throw DimensionError("proximal_average_eval: dimension mismatch");
    total += weights[k];
  }
  detail::SmoothConjugate problem;
  problem.h = [&](const Vector& z, Vector& grad) {
    grad = Vector::Zero(z.size());
    double val = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
      const Vector p = family[k].prox(c * z);
      const double env = family[k].value(p) + (c * z - p).squaredNorm() / (2.0 * c);
      val += weights[k] * (0.5 * c * z.squaredNorm() - env);
      grad += weights[k] * p;
    }
    return val;
  };
  problem.upper_bound = [&](const Vector& z) {
    std::vector<Vector> ps;
    Vector r = x;
    for (std::size_t k = 0; k < family.size(); ++k) {
      ps.push_back(family[k].prox(c * z));
      r -= weights[k] * ps.back();
    }
    double ub = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
      const Vector y = ps[k] + r / total;
      const double fy = family[k].value(y);
      if (!std::isfinite(fy)) return kInf;
      ub += weights[k] * (fy + y.squaredNorm() / (2.0 * c));
    }
    return ub;
  };
  problem.lipschitz = c * total;
  problem.x = x;
  SolveReport rep = detail::solve_smooth_conjugate(problem, Vector::Zero(x.size()), opts);
  if (rep.value.is_finite()) rep.value = ExtReal::finite(rep.value.value() - x.squaredNorm() / (2.0 * c));
  return rep;
}

SampledProx sampled_expectation_prox(const FunctionSampler& family, std::uint64_t seed, long n_samples, double gamma,
                                     const Vector& x) {
  if (n_samples < 2) throw ParameterError("sampled_expectation_prox: need at least two samples");
  require_gamma(gamma);
  std::vector<Vector> draws(static_cast<std::size_t>(n_samples));
  detail::parallel_for(draws.size(), [&](std::size_t i) {
    const auto idx = static_cast<std::uint64_t>(i);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
    std::mt19937_64 rng(seq);
    draws[i] = prox(family(rng), gamma, x);
  });
  Vector mean = Vector::Zero(x.size());
  for (const Vector& d : draws) mean += d;
  mean /= static_cast<double>(n_samples);
  Vector var = Vector::Zero(x.size());
  for (const Vector& d : draws) var += (d - mean).cwiseAbs2();
  var /= static_cast<double>(n_samples - 1);
  return SampledProx{mean, (var / static_cast<double>(n_samples)).cwiseSqrt(), n_samples};
}

Vector enumerated_expectation_prox(const std::vector<double>& weights, const std::vector<ConvexFunction>& family,
                                   double gamma, const Vector& x) {
  if (family.empty() || weights.size() != family.size()) {
    throw ParameterError("enumerated_expectation_prox: need one weight per function");
  }
  Vector out = Vector::Zero(x.size());
  for (std::size_t k = 0; k < family.size(); ++k) out += weights[k] * prox(family[k], gamma, x);
  return out;
}

}  // namespace proxkit
