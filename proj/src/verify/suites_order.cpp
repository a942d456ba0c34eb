#include <cmath>
#include <limits>

#include "verify/kit.hpp"
#include "verify/suites.hpp"

namespace proxkit::verify::suites {

using namespace kit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolverOpts tight(double tol) {
  SolverOpts o;
  o.tol = tol;
  return o;
}

bool is_isometry(const Matrix& l) {
  return (l.transpose() * l - Matrix::Identity(l.cols(), l.cols())).norm() <= 1e-12;
}
bool is_coisometry(const Matrix& l) { return (l * l.transpose() - Matrix::Identity(l.rows(), l.rows())).norm() <= 1e-12; }

double g_at(const ConvexFunction& g, const Vector& y) { return eval(g, y).as_double(); }

// inf { g(Lx - v) : v in ran(Id - L L*) } for ||L|| = 1 and a range of
// dimension at most one.
double norm_one_target(const DenseMap& L, const ConvexFunction& g, const Vector& x, long steps) {
  const Matrix& l = L.matrix();
  const Matrix comp = Matrix::Identity(l.rows(), l.rows()) - l * l.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(comp);
  const Vector lx = l * x;
  std::vector<Eigen::Index> dirs;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > 1e-9) dirs.push_back(i);
  if (dirs.empty()) return g_at(g, lx);
  if (dirs.size() > 1) throw UnsupportedDimension("norm_one_target: range of dimension above 1");
  const Vector k = es.eigenvectors().col(dirs[0]);
  return line_min([&](double t) { return g_at(g, lx - t * k); }, -20.0, 20.0, steps, 3).value;
}

}  // namespace

std::vector<Case> prop20(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const int dims = std::min(s.dims, 2);
  return run_instances("prop20", seed, 2 * s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, dims);
    const DenseMap L = draw_map(rng, n, dims, false);
    const ConvexFunction g = general_fn(rng, L.rows());
    const double gamma = log_unif(rng, 0.1, 10.0);
    const Vector x = pick(rng, 3) ? Vector(gauss(rng, n, 1.5)) : Vector(L.matrix().transpose() * gauss(rng, L.rows()));
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);
    const Vector lx = apply(L, x);

    const SolveReport co = eval_cocomposition(sp, x, opts);
    const SolveReport cp = eval_composition(sp, x, opts);
    out.push_back(at_least("envelope below the cocomposition", dg, envelope(g, gamma, lx), val(co), ineq_slack({err(co)})));
    out.push_back(at_most("cocomposition below g o L", dg, g_at(g, lx), val(co), ineq_slack({err(co)})));
    out.push_back(at_most("cocomposition below the composition", dg, val(cp), val(co), ineq_slack({err(co), err(cp)})));
    const double post = fibre_min(L.matrix(), [&](const Vector& y) { return g_at(g, y); }, x, 20.0, s.grid_steps, 3);
    out.push_back(at_most("infimal postcomposition below the composition", dg, val(cp), post, ineq_slack({err(cp)})));
    if (is_isometry(L.matrix()))
      out.push_back(equal("isometry: composition equals cocomposition", dg, val(cp), val(co), 1e-6 + err(co) + err(cp)));
    if (is_coisometry(L.matrix()))
      out.push_back(equal("coisometry: cocomposition equals g o L", dg, g_at(g, lx), val(co), 1e-6 + err(co)));
  });
}

std::vector<Case> prop25(std::uint64_t seed, const Scale& s) {
  const SolverOpts fine = tight(1e-13);
  return run_instances("prop25", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = s.dims >= 3 ? 2 + pick(rng, 2) : 2;
    const Eigen::Index k = 1 + pick(rng, static_cast<int>(n - 1));
    const DenseMap P = projector(rng, n, k);
    const Matrix& pm = P.matrix();
    const Vector c = pm * gauss(rng, n, 0.7);
    const double gamma = log_unif(rng, 0.1, 10.0);
    ConvexFunction g = ConvexFunction::eucl_norm(n);
    Vector x = gauss(rng, n, 1.5);
    switch (pick(rng, 6)) {
      case 0:
        break;
      case 1:
        g = ConvexFunction::eucl_norm(n).translated(c);
        break;
      case 2:
        g = ConvexFunction::quadratic(n).scaled(unif(rng, 0.3, 2.0)).translated(c);
        break;
      case 3:
        g = ConvexFunction::support_ball(c, unif(rng, 0.2, 1.0));
        break;
      case 4:
        g = ConvexFunction::dist_ball(c, unif(rng, 0.2, 1.0));
        break;
      default:
        // Minimized at 0 and evaluated at x in the orthogonal complement.
        g = pick(rng, 2) ? ConvexFunction::eucl_norm(n) : ConvexFunction::quadratic(n);
        x = x - pm * x;
        break;
    }
    Digest d;
    d << P << g << x << gamma;
    const SolveReport co = eval_cocomposition(CompositionSpec(P, g, gamma), x, fine);
    out.push_back(equal("zero gap on the projection family", d.str(), 0.0, g_at(g, pm * x) - val(co), 1e-8));
  });
}

std::vector<Case> prop30_i(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop30-i", seed, 10 * s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const ConvexFunction g = lipschitz_fn(rng, L.rows(), 1.0);
    const double gamma = log_unif(rng, 1.0 / 64, 16.0);
    const Vector x = gauss(rng, n, 2.0);
    Digest d;
    d << L << g << x << gamma;
    const SolveReport co = eval_cocomposition(CompositionSpec(L, g, gamma), x, opts);
    const double gap = g_at(g, apply(L, x)) - val(co);
    out.push_back(within("gap bound for a 1-Lipschitz g", d.str(), -1e-8, gamma / 2, gap, 1e-6));
  });
}

std::vector<Case> ex_proj(std::uint64_t seed, const Scale& s) {
  const SolverOpts fine = tight(1e-13);
  return run_instances("ex-proj", seed, std::max(10, s.n_points / 2), [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = s.dims >= 3 ? 2 + pick(rng, 2) : 2;
    const DenseMap P = projector(rng, n, 1 + pick(rng, static_cast<int>(n - 1)));
    const ConvexFunction g = ConvexFunction::eucl_norm(n);
    const double gamma = log_unif(rng, 0.1, 10.0);
    const Vector z = gauss(rng, n, 1.5);
    const Vector inside = apply(P, z);
    Digest d;
    d << P << z << gamma;
    const std::string dg = d.str();
    const CompositionSpec sp(P, g, gamma);
    out.push_back(equal("composition on V is the norm", dg, inside.norm(), val(eval_composition(sp, inside, fine)), 1e-9));
    out.push_back(equal("composition off V is +inf", dg, kInf, val(eval_composition(sp, z, fine)), 0.0));
    out.push_back(equal("cocomposition is the norm of the projection", dg, inside.norm(),
                        val(eval_cocomposition(sp, z, fine)), 1e-9));
    out.push_back(equal("cocomposition on V is the norm", dg, inside.norm(), val(eval_cocomposition(sp, inside, fine)),
                        1e-9));
  });
}

std::vector<Case> ex_comp(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const int dims = std::min(s.dims, 2);
  return run_instances("ex-comp", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, dims);
    const Eigen::Index m = 1 + pick(rng, static_cast<int>(n));
    const DenseMap S = coisometry(rng, m, n);
    const double rho = log_unif(rng, 0.25, 4.0);
    const DenseMap L = S.scaled(std::sqrt(rho));
    const ConvexFunction g = general_fn(rng, m);
    const double gamma = log_unif(rng, 0.2, 5.0);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();
    const Vector lx = apply(L, x);

    const SolveReport co = eval_cocomposition(CompositionSpec(S, g.scaled_arg(std::sqrt(rho)), gamma), x, opts);
    out.push_back(equal("g o L as a cocomposition", dg, g_at(g, lx), val(co), 1e-6 + err(co)));

    const Vector q = x + adjoint_apply(L, prox(g, gamma * rho, lx) - lx) / rho;
    auto obj = [&](const Vector& z) { return g_at(g, apply(L, z)) + (x - z).squaredNorm() / (2 * gamma); };
    // Nested one-dimensional minimization; each zoom keeps the neighbours of
    // the grid argmin, which bracket the minimizer of a convex function.
    const double r = std::max(4.0, 2 * (q - x).norm());
    Vector best = x;
    double bv;
    if (n == 1) {
      const LineMin lm = line_min([&](double t) { return obj(Vector::Constant(1, t)); }, x[0] - r, x[0] + r, 101, 7);
      best[0] = lm.arg;
      bv = lm.value;
    } else {
      auto inner = [&](double t0) {
        return line_min([&](double t1) { return obj(make_vector({t0, t1})); }, x[1] - r, x[1] + r, 101, 7);
      };
      const LineMin outer = line_min([&](double t0) { return inner(t0).value; }, x[0] - r, x[0] + r, 101, 7);
      best = make_vector({outer.arg, inner(outer.arg).arg});
      bv = outer.value;
    }
    // Grid points may sit up to the membership tolerance outside dom g.
    out.push_back(at_most("closed-form prox attains the grid minimum", dg, bv, obj(q), 1e-7 * std::max(1.0, std::abs(bv))));
    out.push_back(equal("prox of g o L by the closed formula", dg, 0.0, (q - best).norm(), 2e-3));
  });
}

std::vector<Case> ex_yama(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("ex-yama", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const Eigen::Index m = 1 + pick(rng, static_cast<int>(n));
    const DenseMap L = coisometry(rng, m, n);
    const ConvexFunction g = general_fn(rng, m);
    const double gamma = log_unif(rng, 0.1, 10.0);
    const Vector x = pick(rng, 2) ? Vector(gauss(rng, n, 1.5)) : Vector(adjoint_apply(L, gauss(rng, m)));
    Digest d;
    d << L << g << x << gamma;
    const std::string dg = d.str();
    const CompositionSpec sp(L, g, gamma);
    const Vector lx = apply(L, x);
    const SolveReport co = eval_cocomposition(sp, x, opts);
    out.push_back(equal("cocomposition equals g o L", dg, g_at(g, lx), val(co), 1e-6 + err(co)));
    const bool in_range = (adjoint_apply(L, lx) - x).norm() <= 1e-9 * std::max(1.0, x.norm());
    const SolveReport cp = eval_composition(sp, x, opts);
    out.push_back(equal("composition equals the infimal postcomposition", dg, in_range ? g_at(g, lx) : kInf, val(cp),
                        1e-6 + err(cp)));
  });
}

std::vector<Case> thm45_i(std::uint64_t seed, const Scale& s) {
  const SolverOpts fine = tight(1e-11);
  std::vector<double> gammas;
  for (int k = -8; k <= 8; ++k) gammas.push_back(std::ldexp(1.0, k));
  return run_instances("thm45-i", seed, std::max(5, s.n_points / 4), [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const DenseMap L = draw_map(rng, n, s.dims, pick(rng, 4) != 0);
    const ConvexFunction g = general_fn(rng, L.rows());
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    d << L << g << x;
    const std::string dg = d.str();
    const SweepReport sw = gamma_sweep(L, g, x, gammas, fine);
    for (std::size_t k = 1; k < sw.rows.size(); ++k) {
      out.push_back(at_most("composition non-increasing in gamma", dg, val(sw.rows[k - 1].composition),
                            val(sw.rows[k].composition), 1e-7));
      out.push_back(at_most("cocomposition non-increasing in gamma", dg, val(sw.rows[k - 1].cocomposition),
                            val(sw.rows[k].cocomposition), 1e-7));
    }
  });
}

std::vector<Case> thm45_iv(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const double gamma = std::ldexp(1.0, -10);
  return run_instances("thm45-iv", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const DenseMap L = draw_map(rng, n, s.dims, false);
    const double beta = unif(rng, 0.5, 2.0);
    const ConvexFunction g = lipschitz_fn(rng, L.rows(), beta);
    const Vector x = gauss(rng, n, 2.0);
    Digest d;
    d << L << g << x << beta;
    const SolveReport co = eval_cocomposition(CompositionSpec(L, g, gamma), x, opts);
    const double bound = gamma * beta * beta / 2;
    out.push_back(within("small-gamma limit is g o L", d.str(), -bound - 1e-6, bound,
                         g_at(g, apply(L, x)) - val(co), 1e-6));
  });
}

std::vector<Case> thm45_vi(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const double big = std::ldexp(1.0, 10);
  const int dims = std::min(s.dims, 2);
  return run_instances("thm45-vi", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, dims);
    const Vector x = in_ball(rng, n, 1.0);
    {
      const Eigen::Index m = 1 + pick(rng, dims);
      const DenseMap L = random_map(rng, m, n, 0.2, 0.7);
      const ConvexFunction g = coercive_fn(rng, m, 0.3);
      Digest d;
      d << L << g << x;
      const double inf_g = -conjugate_eval_closed(g, Vector::Zero(m)).as_double();
      out.push_back(equal("large-gamma limit is inf g for a strict contraction", d.str(), inf_g,
                          val(eval_cocomposition(CompositionSpec(L, g, big), x, opts)), 1e-3));
    }
    {
      const DenseMap L = unit_norm_map(rng, n, dims);
      const ConvexFunction g = coercive_fn(rng, L.rows(), 0.3);
      Digest d;
      d << L << g << x;
      out.push_back(equal("large-gamma limit for a norm-one operator", d.str(), norm_one_target(L, g, x, s.grid_steps),
                          val(eval_cocomposition(CompositionSpec(L, g, big), x, opts)), 1e-3));
    }
    {
      const DenseMap L = draw_map(rng, n, dims, true);
      const ConvexFunction g = coercive_fn(rng, L.rows(), 0.3);
      Digest d;
      d << L << g << x;
      const FibreMin post =
          fibre_argmin(L.matrix(), [&](const Vector& y) { return g_at(g, y); }, x, 20.0, s.grid_steps, 3);
      // 0 <= composition - postcomposition <= Phi(y*) / gamma at the fibre minimizer y*.
      const double hg = std::ldexp(1.0, 12);
      const double phi = 0.5 * (post.point.squaredNorm() - x.squaredNorm());
      const SolveReport cp = eval_composition(CompositionSpec(L, g, hg), x, opts);
      out.push_back(within("large-gamma composition approaches the infimal postcomposition", d.str(),
                           -1e-6 - err(cp), phi / hg, val(cp) - post.value, 1e-6 + err(cp)));
    }
  });
}

std::vector<Case> cor46(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const int dims = std::min(s.dims, 2);
  return run_instances("cor46", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, dims);
    const DenseMap L = isometry(rng, n + pick(rng, dims - static_cast<int>(n) + 1), n);
    const ConvexFunction g = coercive_fn(rng, L.rows(), 0.3);
    const Vector x = in_ball(rng, n, 1.0);
    Digest d;
    d << L << g << x;
    const std::string dg = d.str();
    const double post = fibre_min(L.matrix(), [&](const Vector& y) { return g_at(g, y); }, x, 20.0, s.grid_steps, 3);
    const CompositionSpec hi(L, g, std::ldexp(1.0, 12));
    out.push_back(equal("isometry: large-gamma composition limit", dg, post, val(eval_composition(hi, x, opts)), 1e-3));
    out.push_back(
        equal("isometry: large-gamma cocomposition limit", dg, post, val(eval_cocomposition(hi, x, opts)), 1e-3));
    const CompositionSpec lo(L, g, std::ldexp(1.0, -12));
    out.push_back(equal("isometry: small-gamma composition limit", dg, g_at(g, apply(L, x)),
                        val(eval_composition(lo, x, opts)), 1e-3));
  });
}

std::vector<Case> prop55(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  std::vector<double> gammas;
  for (int k = 0; k <= 12; ++k) gammas.push_back(std::ldexp(1.0, -k));
  struct Fixed {
    DenseMap L;
    ConvexFunction g;
  };
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  const std::vector<Fixed> fixed{
      {DenseMap::scalar(0.5), abs1.translated(make_vector({1.0}))},
      {DenseMap::from_rows({{0.6}, {0.6}}),
       ConvexFunction::separable_sum({atom::Block{0.5, abs1.translated(make_vector({1.0})), 0},
                                      atom::Block{0.5, abs1.translated(make_vector({-1.0})), 1}})},
      {DenseMap::scalar(0.8), abs1.plus_quadratic(1.0).plus_affine(make_vector({-2.0}), 2.0)},
  };
  const std::size_t n_random = std::max<std::size_t>(3, s.n_points / 10);
  return run_indexed("prop55", seed, fixed.size() + n_random, [&](std::size_t i, Rng& rng, std::vector<Case>& out) {
    const Fixed inst = [&] {
      if (i < fixed.size()) return fixed[i];
      const Eigen::Index m = 1 + pick(rng, std::min(s.dims, 2));
      return Fixed{random_map(rng, m, 1, 0.3, 1.0), coercive_fn(rng, m, 1.0)};
    }();
    Digest d;
    d << inst.L << inst.g;
    const std::string dg = d.str();
    const double ref = line_min([&](double t) { return g_at(inst.g, apply(inst.L, Vector::Constant(1, t))); }, -20.0,
                                20.0, s.grid_steps, 3)
                           .value;
    const ArgminSequenceReport seq = argmin_sequence(inst.L, inst.g, gammas, opts);
    for (std::size_t k = 0; k < seq.rows.size(); ++k) {
      const SolveReport& r = seq.rows[k].report;
      out.push_back(at_most("infimum of the cocomposition below min g o L", dg, ref, val(r), 1e-8 + err(r)));
      if (k > 0) {
        const SolveReport& prev = seq.rows[k - 1].report;
        out.push_back(at_least("infima non-decreasing as gamma decreases", dg, val(prev), val(r), 1e-8 + err(r) + err(prev)));
      }
    }
    // Random Lipschitz instances: the gap can reach gamma beta^2 / 2 at the last gamma.
    double tol = 1e-4;
    if (i >= fixed.size())
      if (const auto beta = lipschitz_bound(inst.g)) tol = std::max(tol, gammas.back() * *beta * *beta / 2 + 1e-8);
    out.push_back(equal("infimum at gamma = 2^-12 against the grid minimum", dg, ref, val(seq.rows.back().report), tol));

    const CompositionSpec sp(inst.L, inst.g, 1.0);
    const SolveReport am = argmin_cocomposition(sp, opts);
    if (!am.argpoint) throw std::runtime_error("argmin without a minimizer");
    const Vector xs = *am.argpoint;
    const SolveReport at = eval_cocomposition(sp, xs, opts);
    out.push_back(equal("value at the minimizer", dg, val(am), val(at), 1e-6 + err(am) + err(at)));
    for (double delta : {-0.1, -0.01, 0.01, 0.1}) {
      const SolveReport near = eval_cocomposition(sp, xs + Vector::Constant(1, delta), opts);
      out.push_back(at_least("minimizer of the envelope of g o L minimizes the cocomposition", dg, val(at), val(near),
                             ineq_slack({err(at), err(near)})));
    }
  });
}

}  // namespace proxkit::verify::suites
