#include "proxkit/detail/solvers.hpp"

#include <cmath>
#include <limits>

#include "proxkit/detail/fista.hpp"

namespace proxkit::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double relative(double gap, double value) { return gap / std::max(1.0, std::abs(value)); }
}  // namespace

GramSpectrum GramSpectrum::of(const Matrix& l) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(l * l.transpose());
  GramSpectrum s;
  s.u = es.eigenvectors();
  s.lam = es.eigenvalues().cwiseMax(0.0);
  return s;
}

SolveReport solve_dual_quadratic(const DualQuadratic& p, const Vector& y0, const SolverOpts& opts) {
  const Matrix& l = p.l;
  const Vector& lam = p.spectrum.lam;
  const Matrix& u = p.spectrum.u;
  // Eigenvalues of M
  const Vector mu = (p.a - p.c * lam.array()).matrix().cwiseMax(0.0);
  const double lmax = mu.maxCoeff();
  const double lmin = mu.minCoeff();
  const double cut = 1e-12 * std::max(std::abs(p.a), lmax);
  const double smooth = lmax > cut ? lmax : std::abs(p.a);
  const double step = 1.0 / smooth;
  const double kappa = lmin > cut ? lmin / smooth : 0.0;
  const double momentum = kappa > 0 ? (1.0 - std::sqrt(kappa)) / (1.0 + std::sqrt(kappa)) : -1.0;

  auto apply_m = [&](const Vector& y) -> Vector { return p.a * y - p.c * (l * (l.transpose() * y)); };
  // M^dagger and the orthogonal projector onto ker M, through the spectrum.
  Vector mu_inv(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu_inv[i] = mu[i] > cut ? 1.0 / mu[i] : 0.0;
  const bool m_singular = (mu.array() <= cut).any();
  auto apply_m_pinv = [&](const Vector& v) -> Vector { return u * mu_inv.cwiseProduct(u.transpose() * v); };
  auto kernel_part = [&](const Vector& v) -> double {
    if (!m_singular) return 0.0;
    const Vector c = u.transpose() * v;
    double s = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (mu[i] <= cut) s += c[i] * c[i];
    }
    return std::sqrt(s);
  };

  // Along ker M the dual objective is linear: the supremum is +inf unless the
  // component of b in ker M is reachable from dom g. An iterate drifting at
  // the rate of a tiny infeasibility never trips the divergence test, so
  // settle this first.
  if (m_singular && !has_full_domain(p.g)) {
    Matrix k(u.rows(), 0);
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (mu[i] <= cut) {
        k.conservativeResize(Eigen::NoChange, k.cols() + 1);
        k.col(k.cols() - 1) = u.col(i);
      }
    auto pk = [&](const Vector& v) -> Vector { return k * (k.transpose() * v); };
    auto project = [&](const Vector& v, double) -> Vector { return prox(p.g, 1e-12, v); };
    SolverOpts fo = opts;
    fo.tol = 1e-12;
    const FistaResult fr = fista(
        project(p.b, 0.0), 1.0, -1.0, [&](const Vector& y) -> Vector { return pk(y - p.b); }, project,
        [&](const Vector& y) { return 0.5 * pk(y - p.b).squaredNorm(); },
        [](const Vector& w, const Vector&, const Vector& y, double t) { return (w - y).norm() / t; }, fo);
    if (fr.status == SolveStatus::Converged && pk(fr.y - p.b).norm() > kMembershipTol * std::max(1.0, p.b.norm())) {
      SolveReport rep;
      rep.status = SolveStatus::Diverged;
      rep.value = ExtReal::plus_infinity();
      rep.iterations = fr.iterations;
      return rep;
    }
  }

  auto gstar = [&](const Vector& y) { return conjugate_eval_closed(p.g, y).as_double(); };
  auto dual_value = [&](const Vector& y) { return p.b.dot(y) - gstar(y) - 0.5 * y.dot(apply_m(y)); };

  auto grad = [&](const Vector& w) -> Vector { return apply_m(w) - p.b; };
  auto prox = [&](const Vector& v, double t) -> Vector { return prox_conjugate(p.g, t, v); };
  auto objective = [&](const Vector& y) { return -dual_value(y); };
  auto residual = [&](const Vector& w, const Vector& v, const Vector& y, double t) -> double {
    const double d = dual_value(y);
    if (std::isfinite(d)) {
      double gap = kInf;
      // Candidate z = b - M y: Fenchel-Young gap of g at (z, y).
      const Vector my = apply_m(y);
      const Vector z1 = p.b - my;
      const double gz1 = eval(p.g, z1).as_double();
      if (std::isfinite(gz1)) gap = std::min(gap, gz1 + gstar(y) - z1.dot(y));
      // Candidate from the prox step: zeta in dom g with y in the subdifferential of g at zeta.
      const Vector zeta = (v - y) / t;
      const Vector r = p.b - zeta;
      if (kernel_part(r) <= 1e-9 * std::max(1.0, r.norm())) {
        const double gz = eval(p.g, zeta).as_double();
        if (std::isfinite(gz)) gap = std::min(gap, gz + 0.5 * r.dot(apply_m_pinv(r)) - d);
      }
      if (std::isfinite(gap)) return relative(std::max(gap, 0.0), d);
    }
    return (w - y).norm() / t;
  };

  FistaResult fr = fista(y0, step, momentum, grad, prox, objective, residual, opts);
  SolveReport rep;
  rep.iterations = fr.iterations;
  rep.residual = fr.residual;
  rep.status = fr.status;
  if (fr.status == SolveStatus::Diverged) {
    rep.value = ExtReal::plus_infinity();
    return rep;
  }
  double d = dual_value(fr.y);
  if (d == -kInf) {
    // Far from the origin the last iterate can miss dom g^* by rounding; a
    // prox step of g^* with a tiny parameter puts it back.
    fr.y = prox_conjugate(p.g, 1e-12, fr.y);
    d = dual_value(fr.y);
  }
  rep.value = ExtReal::from_double(std::isnan(d) ? kInf : d);
  rep.argpoint = std::move(fr.y);
  return rep;
}

SolveReport solve_smooth_conjugate(const SmoothConjugate& p, const Vector& z0, const SolverOpts& opts) {
  const double step = 1.0 / p.lipschitz;
  Vector g_scratch(p.x.size());
  auto grad = [&](const Vector& z) -> Vector {
    p.h(z, g_scratch);
    return g_scratch - p.x;
  };
  auto prox = [](const Vector& v, double) -> Vector { return v; };
  auto objective = [&](const Vector& z) {
    Vector g(z.size());
    return p.h(z, g) - z.dot(p.x);
  };
  auto residual = [&](const Vector& w, const Vector&, const Vector& z, double t) -> double {
    const double gnorm = (w - z).norm() / t;
    if (p.upper_bound && gnorm <= 1e-3) {
      Vector g(z.size());
      const double d = z.dot(p.x) - p.h(z, g);
      const double ub = p.upper_bound(z);
      if (std::isfinite(ub)) return relative(std::max(ub - d, 0.0), d);
    }
    return gnorm;
  };
  FistaResult fr = fista(z0, step, -1.0, grad, prox, objective, residual, opts);
  SolveReport rep;
  rep.iterations = fr.iterations;
  rep.residual = fr.residual;
  rep.status = fr.status;
  if (fr.status == SolveStatus::Diverged) {
    rep.value = ExtReal::plus_infinity();
    return rep;
  }
  Vector g(fr.y.size());
  rep.value = ExtReal::from_double(fr.y.dot(p.x) - p.h(fr.y, g));
  rep.argpoint = std::move(fr.y);
  return rep;
}

AffineMin minimize_over_affine(const ConvexFunction& g, const Vector& anchor, const Matrix& basis,
                               const SolverOpts& opts) {
  require_dim(anchor, g.dim(), "minimize_over_affine");
  auto project = [&](const Vector& y) -> Vector {
    if (basis.cols() == 0) return anchor;
    return anchor + basis * (basis.transpose() * (y - anchor));
  };
  const double t = 1.0;
  Vector z = anchor;
  AffineMin out{kInf, anchor, SolveStatus::MaxIter, 0};
  auto value_at = [&](const Vector& zz) {
    const Vector xg = prox(g, t, zz);
    const Vector xa = project(2.0 * xg - zz);
    const double va = eval(g, xa).as_double();
    if (std::isfinite(va)) return std::pair{va, xa};
    // Feasible for the affine set up to the DR residual only.
    return std::pair{eval(g, xg).as_double(), xg};
  };
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vector xg = prox(g, t, z);
    const Vector xa = project(2.0 * xg - z);
    const Vector dz = xa - xg;
    z += dz;
    out.iterations = it;
    if (dz.norm() <= opts.tol) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (z.norm() > opts.divergence_radius) {
      out.status = SolveStatus::Diverged;
      out.value = kInf;
      out.point = z;
      return out;
    }
  }
  auto [v, pt] = value_at(z);
  out.value = v;
  out.point = pt;
  return out;
}

SolveReport minimize_smooth(const SmoothMin& p, const Vector& x0, const SolverOpts& opts) {
  const double step = 1.0 / p.lipschitz;
  Vector g(x0.size());
  auto grad = [&](const Vector& x) -> Vector {
    p.f(x, g);
    return g;
  };
  auto prox = [](const Vector& v, double) -> Vector { return v; };
  auto objective = [&](const Vector& x) {
    Vector gg(x.size());
    return p.f(x, gg);
  };
  auto residual = [](const Vector& w, const Vector&, const Vector& x, double) { return (w - x).norm(); };
  FistaResult fr = fista(x0, step, -1.0, grad, prox, objective, residual, opts);
  SolveReport rep;
  rep.iterations = fr.iterations;
  rep.residual = fr.residual;
  rep.status = fr.status;
  if (fr.status == SolveStatus::Diverged) {
    rep.value = ExtReal::plus_infinity();
    rep.argpoint = fr.y;
    return rep;
  }
  Vector gg(fr.y.size());
  rep.value = ExtReal::from_double(p.f(fr.y, gg));
  rep.argpoint = std::move(fr.y);
  return rep;
}

}  // namespace proxkit::detail
