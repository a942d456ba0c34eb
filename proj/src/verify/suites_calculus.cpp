#include <cmath>
#include <limits>

#include "verify/kit.hpp"
#include "verify/suites.hpp"

namespace proxkit::verify::suites {

using namespace kit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cocomp(const CompositionSpec& s, const Vector& x, const SolverOpts& o = {}) {
  return val(eval_cocomposition(s, x, o));
}
double comp(const CompositionSpec& s, const Vector& x, const SolverOpts& o = {}) {
  return val(eval_composition(s, x, o));
}
double rel(double tol, double v) { return tol * std::max(1.0, std::isfinite(v) ? std::abs(v) : 1.0); }

SolverOpts tight(double tol) {
  SolverOpts o;
  o.tol = tol;
  return o;
}

Eigen::Index draw_dim(Rng& rng, const Scale& s) { return 1 + pick(rng, s.dims); }

}  // namespace

std::vector<Case> lemmas(std::uint64_t seed, const Scale& s) {
  return run_instances("lemmas", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    for (Eigen::Index m = 1; m <= s.dims; ++m) {
      for (const auto& a : catalog_atoms(m)) {
        const ConvexFunction& f = a.f;
        const Vector x = gauss(rng, m, 2.0);
        const double gamma = log_unif(rng, 0.1, 10.0);
        const double rho = log_unif(rng, 0.3, 3.0);
        Digest d;
        d << a.name << f << x << gamma << rho;
        const std::string dg = d.str();

        const Vector p1 = prox(f, 1.0, x);
        out.push_back(equal("moreau decomposition " + a.name, dg, 0.0,
                            (p1 + conjugate_prox_reference(f, 1.0, x) - x).norm(), 1e-9));
        const Vector pg = prox(f, gamma, x);
        out.push_back(equal("moreau decomposition, parameter gamma " + a.name, dg, 0.0,
                            (pg + gamma * conjugate_prox_reference(f, 1.0 / gamma, x / gamma) - x).norm(), 1e-9));

        // (x - p1) is a subgradient at p1, so y lies in the domain of the conjugates below.
        const Vector y = rho * (x - p1);
        const double c_scaled = conjugate_eval_closed(f.scaled(rho), y).as_double();
        const double c_ref = (rho * conjugate_eval_closed(f, y / rho)).as_double();
        out.push_back(equal("conjugate of rho f " + a.name, dg, c_ref, c_scaled, rel(1e-10, c_ref)));
        const double c_arg = conjugate_eval_closed(f.scaled_arg(rho), y).as_double();
        const double c_arg_ref = conjugate_eval_closed(f, y / rho).as_double();
        out.push_back(equal("conjugate of f(rho .) " + a.name, dg, c_arg_ref, c_arg, rel(1e-10, c_arg_ref)));

        const double e_ref = rho * envelope(f, gamma, x);
        out.push_back(equal("envelope of rho f " + a.name, dg, e_ref, envelope(f.scaled(rho), gamma / rho, x),
                            rel(1e-9, e_ref)));
        const double ea_ref = envelope(f, gamma, rho * x);
        out.push_back(equal("envelope of f(rho .) " + a.name, dg, ea_ref,
                            envelope(f.scaled_arg(rho), gamma / (rho * rho), x), rel(1e-9, ea_ref)));

        Vector dir = gauss(rng, m);
        dir /= dir.norm();
        const double h = 1e-5;
        const double ep = envelope(f, gamma, x + h * dir), em = envelope(f, gamma, x - h * dir);
        const double fd = (ep - em) / (2 * h);
        out.push_back(equal("envelope gradient " + a.name, dg, envelope_gradient(f, gamma, x).dot(dir), fd,
                            h / gamma + rel(1e-9, ep) / h));

        const Vector ys = gauss(rng, m, 2.0);
        const Vector q = conjugate_prox_reference(f, gamma, ys);
        const double env_conj = conjugate_eval_closed(f, q).as_double() + (ys - q).squaredNorm() / (2 * gamma);
        const double c_quad = conjugate_eval_closed(f.plus_quadratic(gamma), ys).as_double();
        out.push_back(equal("conjugate of f + gamma Q " + a.name, dg, env_conj, c_quad, rel(1e-9, env_conj)));
      }

      // Quadratic form conjugate through the generalized inverse.
      Matrix a;
      if (m == 1) {
        a = Matrix::Constant(1, 1, unif(rng, 0.2, 3.0));
      } else {
        const Matrix b = gauss_mat(rng, m, m - 1);
        a = b * b.transpose();
      }
      const Matrix pinv = a.completeOrthogonalDecomposition().pseudoInverse();
      const ConvexFunction qa = ConvexFunction::quad_form(a);
      const Vector yin = a * gauss(rng, m);
      Digest d;
      d << "quad-conjugate" << a << yin;
      const double want = 0.5 * yin.dot(pinv * yin);
      out.push_back(equal("quadratic conjugate on the range", d.str(), want, conjugate_eval_closed(qa, yin).as_double(),
                          rel(1e-10, want)));
      if (m > 1) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        const Vector yout = yin + es.eigenvectors().col(0);
        out.push_back(equal("quadratic conjugate off the range", d.str(), kInf,
                            conjugate_eval_closed(qa, yout).as_double(), 0.0));
      }
    }
  });
}

std::vector<Case> prop1(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop1", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, pick(rng, 5) != 0);
    const ConvexFunction g = pick(rng, 2) ? full_domain_fn(rng, L.rows()) : general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0), rho = log_unif(rng, 0.3, 3.0);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x << gamma << rho;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);
    auto add = [&](const char* label, double want, double got) {
      out.push_back(equal(label, dg, want, got, std::max(1e-6, eq_slack(opts.tol, {want, got}))));
    };
    add("scaled composition", rho * comp(sp, x, opts),
        comp(CompositionSpec(L, g.scaled(rho), gamma / rho), x, opts));
    add("composition at a scaled argument", comp(sp, rho * x, opts),
        comp(CompositionSpec(L, g.scaled_arg(rho), gamma / (rho * rho)), x, opts));
    add("scaled cocomposition", rho * cocomp(sp, x, opts),
        cocomp(CompositionSpec(L, g.scaled(rho), gamma / rho), x, opts));
    add("cocomposition at a scaled argument", cocomp(sp, rho * x, opts),
        cocomp(CompositionSpec(L, g.scaled_arg(rho), gamma / (rho * rho)), x, opts));
  });
}

std::vector<Case> prop4(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop4", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const Eigen::Index m = 1 + pick(rng, static_cast<int>(std::min<Eigen::Index>(s.dims, n + 1)));
    const DenseMap L = pick(rng, 4) ? random_map(rng, m, n) : (m >= n ? isometry(rng, m, n) : coisometry(rng, m, n));
    const ConvexFunction g = general_fn(rng, m);
    const double gamma = log_unif(rng, 0.1, 10.0);
    const Vector x = pick(rng, 2) ? Vector(gauss(rng, n, 1.5)) : Vector(L.matrix().transpose() * gauss(rng, m));
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);

    const SolveReport pc = eval_composition(sp, x, opts);
    const double xx = x.squaredNorm();
    const double fibre = fibre_min(
        L.matrix(), [&](const Vector& y) { return eval(g, y).as_double() + (y.squaredNorm() - xx) / (2 * gamma); }, x,
        20.0, s.grid_steps, 3);
    out.push_back(equal("composition as a constrained minimum", dg, fibre, val(pc), ineq_slack({err(pc)})));

    if (m == 1) {
      const double lx = apply(L, x)[0];
      const Vector lt = L.matrix().transpose().col(0);
      const auto dual = [&](double r) {
        return line_min(
            [&](double t) {
              const double phi = 0.5 * t * t * (1.0 - lt.squaredNorm());
              const Vector yv = Vector::Constant(1, t);
              return -(t * lx - conjugate_eval_closed(g, yv).as_double() - gamma * phi);
            },
            -r, r, s.grid_steps, 3);
      };
      const LineMin d50 = dual(50.0);
      double sup = -d50.value;
      // A maximiser on the boundary of the window: unbounded if doubling it still gains.
      if (std::abs(d50.arg) > 49.0 && -dual(100.0).value > sup + 1e-6 * std::max(1.0, std::abs(sup)))
        sup = std::numeric_limits<double>::infinity();
      const SolveReport pco = eval_cocomposition(sp, x, opts);
      out.push_back(equal("cocomposition as a dual supremum", dg, sup, val(pco), ineq_slack({err(pco)})));
    }

    if (n >= 2) {
      const DenseMap P = projector(rng, n, 1);
      const ConvexFunction h = full_domain_fn(rng, n);
      const Vector z = gauss(rng, n);
      const Vector inside = apply(P, z);
      const CompositionSpec ps(P, h, gamma);
      Digest dp;
      dp << P << h << z << gamma;
      out.push_back(equal("composition off the range is +inf", dp.str(), kInf, comp(ps, z, opts), 0.0));
      out.push_back(at_most("composition on the range is finite", dp.str(), 1e300, comp(ps, inside, opts), 0.0));
    }
    const DenseMap Ls = random_map(rng, m, n, 0.3, 0.95);
    const double r = unif(rng, 0.5, 2.0);
    const ConvexFunction ind = ConvexFunction::indicator_ball(Vector::Zero(m), r);
    const Vector far = gauss(rng, n, 10.0);
    Digest di;
    di << Ls << ind << far << gamma;
    out.push_back(at_most("cocomposition of an indicator is finite for a strict contraction", di.str(), 1e300,
                          cocomp(CompositionSpec(Ls, ind, gamma), far, opts), 0.0));
  });
}

std::vector<Case> prop5(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop5", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, pick(rng, 5) != 0);
    const ConvexFunction g = pick(rng, 2) ? full_domain_fn(rng, L.rows()) : general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0), rho = log_unif(rng, 0.2, 3.0);
    const double alpha = unif(rng, -1.0, 1.0);
    const Vector u = gauss(rng, n), x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x << u << gamma << rho << alpha;
    const std::string dg = d.str();

    const Vector lu = apply(L, u);
    const double direct = comp(CompositionSpec(L, g.plus_quadratic(rho).plus_affine(lu, alpha), gamma), x, opts);
    const double beta = gamma / (1.0 + rho * gamma);
    const double base = comp(CompositionSpec(L, g, beta), x, opts);
    const double closed = base + 0.5 * rho * x.squaredNorm() + x.dot(u) + alpha;
    out.push_back(equal("quadratic and affine perturbation of the composition", dg, closed, direct,
                        std::max(1e-6, eq_slack(opts.tol, {direct, base}))));

    const double shifted = cocomp(CompositionSpec(L, g.translated(lu).plus_affine(Vector::Zero(L.rows()), alpha), gamma),
                                  x, opts);
    const double ref = cocomp(CompositionSpec(L, g, gamma), x - u, opts);
    out.push_back(equal("translation of the cocomposition", dg, ref + alpha, shifted,
                        std::max(1e-6, eq_slack(opts.tol, {shifted, ref}))));
  });
}

std::vector<Case> prop6(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop6", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const Eigen::Index m = n + pick(rng, static_cast<int>(std::max<Eigen::Index>(s.dims, n) - n) + 1);
    const DenseMap L = random_map(rng, m, n);
    const double alpha = pick(rng, 2) ? 0.0 : unif(rng, 0.1, 1.0);
    const ConvexFunction h = general_fn(rng, m);
    const ConvexFunction g = alpha > 0 ? h.plus_quadratic(alpha) : h;
    const double gamma = log_unif(rng, 0.1, 10.0);
    const double nl = spectral_norm(L.matrix());
    const double beta = (alpha + 1.0 / gamma) / (nl * nl) - 1.0 / gamma;
    const CompositionSpec sp(L, g, gamma);
    const Vector a = gauss(rng, n, 1.5), b = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << a << b << gamma << alpha;
    const std::string dg = d.str();
    auto shifted = [&](const Vector& z, double& e) {
      const SolveReport r = eval_composition(sp, z, opts);
      e += err(r);
      return val(r) - 0.5 * beta * z.squaredNorm();
    };
    for (double t : {0.5, 0.25}) {
      double e = 0.0;
      const double fa = shifted(a, e), fb = shifted(b, e), fm = shifted((1 - t) * a + t * b, e);
      out.push_back(at_most("convexity of the shifted composition", dg, (1 - t) * fa + t * fb, fm, ineq_slack({e})));
    }
  });
}

std::vector<Case> prop7(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop7", seed, 2 * s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, true);
    const ConvexFunction g = general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0);
    const CompositionSpec sp(L, g, gamma);
    const Vector a = gauss(rng, n, 1.5), b = gauss(rng, n, 1.5), x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << a << b << x << gamma;
    const std::string dg = d.str();
    const Vector mid = 0.5 * (a + b);
    {
      const SolveReport ra = eval_cocomposition(sp, a, opts), rb = eval_cocomposition(sp, b, opts),
                        rm = eval_cocomposition(sp, mid, opts);
      out.push_back(at_most("midpoint convexity of the cocomposition", dg, 0.5 * (val(ra) + val(rb)), val(rm),
                            ineq_slack({err(ra), err(rb), err(rm)})));
    }
    {
      const SolveReport ra = eval_composition(sp, a, opts), rb = eval_composition(sp, b, opts),
                        rm = eval_composition(sp, mid, opts);
      out.push_back(at_most("midpoint convexity of the composition", dg, 0.5 * (val(ra) + val(rb)), val(rm),
                            ineq_slack({err(ra), err(rb), err(rm)})));
    }
    const MixtureSpec single({{1.0, L, g}}, gamma);
    {
      const Vector p = prox_cocomposition(sp, x);
      const Vector u = (x - p) / gamma;
      const SolveReport f = eval_cocomposition(sp, p, opts);
      const SolveReport c = comixture_conjugate_eval(single, u, opts);
      out.push_back(equal("Fenchel-Young equality for the cocomposition", dg, p.dot(u), val(f) + val(c),
                          1e-5 + err(f) + err(c)));
    }
    {
      const Vector p = prox_composition(sp, x);
      const Vector u = (x - p) / gamma;
      const SolveReport f = eval_composition(sp, p, opts);
      const SolveReport c = mixture_conjugate_eval(single, u, opts);
      out.push_back(equal("Fenchel-Young equality for the composition", dg, p.dot(u), val(f) + val(c),
                          1e-5 + err(f) + err(c)));
    }
  });
}

std::vector<Case> prop9(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop9", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, true);
    const ConvexFunction g = general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0);
    const CompositionSpec sp(L, g, gamma);
    const Vector x = gauss(rng, n, 2.0);
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();

    const SubgradientWitness w = subgradient_witness_cocomposition(sp, x);
    const SolveReport fp = eval_cocomposition(sp, w.point, opts);
    for (int k = 0; k < 3; ++k) {
      const Vector z = w.point + gauss(rng, n, 1.0);
      const SolveReport fz = eval_cocomposition(sp, z, opts);
      out.push_back(at_least("subgradient inequality of the cocomposition", dg, val(fp) + w.subgradient.dot(z - w.point),
                             val(fz), ineq_slack({err(fp), err(fz)})));
    }
    // Resolvent structure: with r = prox(g, gamma, Lx) and y = (Lx - r)/gamma,
    // y is a subgradient of g at r, s = L* y and L p = r + gamma (Id - L L*) y.
    const Vector lx = apply(L, x);
    const Vector r = prox(g, gamma, lx);
    const Vector y = (lx - r) / gamma;
    const double scale = std::max(1.0, x.norm());
    out.push_back(equal("witness is the adjoint image of the dual point", dg, 0.0,
                        (w.subgradient - adjoint_apply(L, y)).norm(), 1e-12 * scale));
    out.push_back(equal("resolvent identity at the witness", dg, 0.0,
                        (apply(L, w.point) - r - gamma * gram_complement_apply(L, y)).norm(), 1e-12 * scale));
    const double gr = eval(g, r).as_double();
    for (int k = 0; k < 2; ++k) {
      const Vector v = prox(g, 1.0, r + gauss(rng, L.rows(), 1.0));
      out.push_back(at_least("dual point is a subgradient of g", dg, gr + y.dot(v - r), eval(g, v).as_double(),
                             1e-9 * std::max(1.0, std::abs(gr))));
    }

    const Vector pc = prox_composition(sp, x);
    const Vector sc = (x - pc) / gamma;
    const SolveReport gp = eval_composition(sp, pc, opts);
    for (int k = 0; k < 2; ++k) {
      const Vector z = pc + gauss(rng, n, 1.0);
      const SolveReport gz = eval_composition(sp, z, opts);
      out.push_back(at_least("subgradient inequality of the composition", dg, val(gp) + sc.dot(z - pc), val(gz),
                             ineq_slack({err(gp), err(gz)})));
    }
  });
}

std::vector<Case> prop10(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const SolverOpts fine = tight(1e-9);
  return run_instances("prop10", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const ConvexFunction g = general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 5.0), rho = log_unif(rng, 0.2, 2.0);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x << gamma << rho;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);

    const Vector p = prox_cocomposition(sp, x);
    const SolveReport fp = eval_cocomposition(sp, p, opts);
    const double env_lhs = val(fp) + (x - p).squaredNorm() / (2 * gamma);
    const double env_rhs = envelope(g, gamma, apply(L, x));
    out.push_back(equal("envelope of the cocomposition at its own parameter", dg, env_rhs, env_lhs,
                        ineq_slack({err(fp)})));

    if (n == 1) {
      const CompositionSpec big = sp.with_gamma(gamma + rho);
      const double x0 = x[0];
      const double moreau_inf =
          line_min(
              [&](double z) {
                return cocomp(big, Vector::Constant(1, z), fine) + (x0 - z) * (x0 - z) / (2 * rho);
              },
              x0 - 8.0, x0 + 8.0, 41, 8)
              .value;
      const SolveReport inner = eval_cocomposition(sp.with_fn(g.moreau_envelope(rho)), x, opts);
      out.push_back(equal("envelope of the cocomposition, shifted parameter", dg, moreau_inf, val(inner), 1e-4));
      out.push_back(equal("envelope_cocomposition, shifted parameter", dg, moreau_inf,
                          envelope_cocomposition(big, rho, x, opts), 1e-4));
    }
  });
}

std::vector<Case> cor11(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("cor11", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, true);
    const ConvexFunction g = general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.2, 5.0);
    const Eigen::Index k = pick(rng, 2) ? n : draw_dim(rng, s);
    Matrix sm;
    if (k == n) {
      Eigen::JacobiSVD<Matrix> svd(gauss_mat(rng, n, n), Eigen::ComputeFullU | Eigen::ComputeFullV);
      Vector sig(n);
      for (Eigen::Index i = 0; i < n; ++i) sig[i] = unif(rng, 0.3, 0.9);
      sm = svd.matrixU() * sig.asDiagonal() * svd.matrixV().transpose();
    } else {
      sm = random_map(rng, n, k, 0.3, 0.9).matrix();
    }
    const DenseMap S(sm);
    const Vector x = gauss(rng, k, 1.5);
    Digest d;
    d << L << S << g << x << gamma;
    const std::string dg = d.str();
    const CompositionSpec inner(L, g, gamma);
    const CompositionSpec outer(L.compose(S), g, gamma);

    const SolveReport nested = eval_cocomposition_splitting(S, proximable_cocomposition(inner, opts), x, opts);
    const SolveReport direct = eval_cocomposition(outer, x, opts);
    out.push_back(equal("associativity of the cocomposition", dg, val(direct), val(nested),
                        1e-5 + err(direct) + err(nested)));

    if (k == n) {
      // S invertible: the only feasible point of the outer constraint is S^{-*} x.
      const Vector y = sm.transpose().fullPivLu().solve(x);
      const SolveReport iy = eval_composition(inner, y, opts);
      const double lhs = val(iy) + (y.squaredNorm() - x.squaredNorm()) / (2 * gamma);
      const SolveReport rhs = eval_composition(outer, x, opts);
      out.push_back(equal("associativity of the composition", dg, val(rhs), lhs, 1e-5 + err(iy) + err(rhs)));
    }
  });
}

std::vector<Case> prop13(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop13", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const ConvexFunction g = lipschitz_fn(rng, L.rows(), unif(rng, 0.5, 2.0));
    const double gamma = log_unif(rng, 0.1, 10.0);
    const CompositionSpec sp(L, g, gamma);
    const Vector x0 = gauss(rng, n);
    const double t = 1e6;
    for (int k = 0; k < 2; ++k) {
      const Vector dir = gauss(rng, n, 1.5);
      Digest d;
      d << L << g << x0 << dir << gamma;
      const double r = recession_cocomposition(sp, dir).as_double();
      const double q = (cocomp(sp, x0 + t * dir, opts) - cocomp(sp, x0, opts)) / t;
      out.push_back(equal("recession function by difference quotient", d.str(), r, q, 1e-3 * std::max(1.0, std::abs(r))));
      out.push_back(at_most("difference quotient below the recession function", d.str(), r, q,
                            1e-6 * std::max(1.0, std::abs(r))));
    }
  });
}

std::vector<Case> prop16(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop16", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const bool lip = pick(rng, 2) == 0;
    const ConvexFunction g = lip ? lipschitz_fn(rng, L.rows(), unif(rng, 0.5, 2.0)) : general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0), xi = log_unif(rng, 0.1, 10.0);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x << gamma << xi;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);

    const double persp = perspective_cocomposition(sp, x, xi, opts).as_double();
    const SolveReport ref =
        eval_cocomposition(CompositionSpec(L, g.scaled_arg(1.0 / xi).scaled(xi), xi * gamma), x, opts);
    out.push_back(equal("perspective as a cocomposition with parameter xi gamma", dg, val(ref), persp,
                        std::max(1e-6, eq_slack(opts.tol, {persp, val(ref)}))));
    out.push_back(equal("perspective at negative xi", dg, kInf, perspective_cocomposition(sp, x, -xi, opts).as_double(),
                        0.0));
    if (lip) {
      const double r = perspective_cocomposition(sp, x, 0.0, opts).as_double();
      const double small = perspective_cocomposition(sp, x, 1e-5, opts).as_double();
      out.push_back(equal("perspective at xi = 0 as the limit xi -> 0", dg, r, small,
                          1e-3 * std::max(1.0, std::abs(r))));
    }
  });
}

std::vector<Case> prop17(std::uint64_t seed, const Scale& s) {
  const SolverOpts fine = tight(1e-11);
  return run_instances("prop17", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index m = 1 + pick(rng, std::min(s.dims, 2));
    const DenseMap L = pick(rng, 4) ? random_map(rng, m, 1, 0.3, 1.0) : isometry(rng, m, 1);
    const ConvexFunction g = general_fn(rng, m);
    const double gamma = log_unif(rng, 0.2, 5.0);
    const double x0 = unif(rng, -3.0, 3.0);
    const Vector x = Vector::Constant(1, x0);
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);
    // Coarse pass with step 0.1, then step 1e-3 around the incumbent.
    auto grid_prox = [&](const std::function<double(double)>& f) {
      const double c = line_min([&](double z) { return f(z) + (x0 - z) * (x0 - z) / (2 * gamma); }, x0 - 4.0,
                                x0 + 4.0, 80, 0)
                           .arg;
      return line_min([&](double z) { return f(z) + (x0 - z) * (x0 - z) / (2 * gamma); }, c - 0.2, c + 0.2, 400, 0)
          .arg;
    };
    const double step = 1e-3;
    const double gco = grid_prox([&](double z) { return cocomp(sp, Vector::Constant(1, z), fine); });
    out.push_back(equal("prox of the cocomposition against a grid argmin", dg, gco, prox_cocomposition(sp, x)[0],
                        2 * step));
    const double gc = grid_prox([&](double z) { return comp(sp, Vector::Constant(1, z), fine); });
    out.push_back(equal("prox of the composition against a grid argmin", dg, gc, prox_composition(sp, x)[0],
                        2 * step));
  });
}

std::vector<Case> prop18(std::uint64_t seed, const Scale& s) {
  const SolverOpts fine = tight(1e-12);
  return run_instances("prop18", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const Eigen::Index m = draw_dim(rng, s);
    const DenseMap L = random_map(rng, m, n, 0.3, 0.95);
    const ConvexFunction g = general_fn(rng, m);
    const double gamma = log_unif(rng, 0.1, 10.0);
    const double nl = spectral_norm(L.matrix());
    const double beta = gamma * (1.0 / (nl * nl) - 1.0);
    const CompositionSpec sp(L, g, gamma);
    Digest d;
    d << L << g << gamma;
    // Gradients at prox points are the closed-form witnesses.
    double ratio = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Vector a = gauss(rng, n, 2.0), b = gauss(rng, n, 2.0);
      const SubgradientWitness wa = subgradient_witness_cocomposition(sp, a);
      const SubgradientWitness wb = subgradient_witness_cocomposition(sp, b);
      const double dist = (wa.point - wb.point).norm();
      if (dist > 1e-9) ratio = std::max(ratio, (wa.subgradient - wb.subgradient).norm() / dist);
      d << a << b;
    }
    out.push_back(at_most("gradient Lipschitz estimate", d.str(), 1.1 / beta, ratio, 0.0));

    const Vector x = gauss(rng, n, 2.0);
    Vector dir = gauss(rng, n);
    dir /= dir.norm();
    const SubgradientWitness w = subgradient_witness_cocomposition(sp, x);
    const double h = 1e-4;
    const SolveReport fp = eval_cocomposition(sp, w.point + h * dir, fine);
    const SolveReport fm = eval_cocomposition(sp, w.point - h * dir, fine);
    Digest dx;
    dx << L << g << gamma << x << dir;
    out.push_back(equal("gradient against a central difference", dx.str(), w.subgradient.dot(dir),
                        (val(fp) - val(fm)) / (2 * h), h / beta + (err(fp) + err(fm)) / h + 1e-9));
  });
}

std::vector<Case> cor19(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("cor19", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = draw_dim(rng, s);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const double beta = unif(rng, 0.5, 2.0);
    const ConvexFunction g = lipschitz_fn(rng, L.rows(), beta);
    const double gamma = log_unif(rng, 0.1, 10.0);
    const double nl = spectral_norm(L.matrix());
    const CompositionSpec sp(L, g, gamma);
    for (int k = 0; k < 2; ++k) {
      const Vector a = gauss(rng, n, 2.0);
      const Vector b = pick(rng, 2) ? Vector(a + gauss(rng, n, 0.1)) : Vector(gauss(rng, n, 2.0));
      Digest d;
      d << L << g << gamma << beta << a << b;
      const double fa = cocomp(sp, a, opts), fb = cocomp(sp, b, opts);
      out.push_back(at_most("Lipschitz transfer", d.str(), beta * nl * (a - b).norm(), std::abs(fa - fb),
                            eq_slack(opts.tol, {fa, fb})));
    }
  });
}

}  // namespace proxkit::verify::suites
