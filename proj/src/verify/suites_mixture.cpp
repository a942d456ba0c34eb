#include <cmath>
#include <limits>

#include "verify/kit.hpp"
#include "verify/suites.hpp"

namespace proxkit::verify::suites {

using namespace kit;

namespace {

double g_at(const ConvexFunction& g, const Vector& y) { return eval(g, y).as_double(); }

std::vector<double> probability_weights(Rng& rng, int k) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& v : w) sum += (v = unif(rng, 0.2, 1.0));
  for (double& v : w) v /= sum;
  return w;
}

// Terms with budget sum alpha_k ||L_k||^2 equal to `budget`.
MixtureSpec scaled_family(Rng& rng, Eigen::Index n, int dims, int k, double budget, double gamma,
                          const std::function<ConvexFunction(Eigen::Index)>& make_g) {
  std::vector<MixtureTerm> terms;
  double used = 0.0;
  for (int j = 0; j < k; ++j) {
    const Eigen::Index m = 1 + pick(rng, dims);
    const DenseMap L = random_map(rng, m, n, 0.3, 1.0);
    const double a = unif(rng, 0.2, 1.0);
    const double nl = spectral_norm(L.matrix());
    used += a * nl * nl;
    terms.push_back({a, L, make_g(m)});
  }
  for (auto& t : terms) t.alpha *= budget / used;
  return MixtureSpec(std::move(terms), gamma);
}

// Probability weights and operators of norm at most one.
MixtureSpec probability_family(Rng& rng, Eigen::Index n, int dims, int k, double gamma, bool isometries,
                               const std::function<ConvexFunction(Eigen::Index)>& make_g) {
  const std::vector<double> w = probability_weights(rng, k);
  std::vector<MixtureTerm> terms;
  for (int j = 0; j < k; ++j) {
    if (isometries) {
      const Eigen::Index m = n + pick(rng, std::max(dims, static_cast<int>(n)) - static_cast<int>(n) + 1);
      terms.push_back({w[j], isometry(rng, m, n), make_g(m)});
    } else {
      const Eigen::Index m = 1 + pick(rng, dims);
      terms.push_back({w[j], random_map(rng, m, n, 0.3, 1.0), make_g(m)});
    }
  }
  return MixtureSpec(std::move(terms), gamma);
}

void digest_spec(Digest& d, const MixtureSpec& s) {
  d << s.gamma();
  for (const auto& t : s.terms()) d << t.alpha << t.op << t.fn;
}

double sum_values(const MixtureSpec& s, const Vector& x) {
  double v = 0.0;
  for (const auto& t : s.terms()) v += t.alpha * g_at(t.fn, apply(t.op, x));
  return v;
}

double draw_budget(Rng& rng) { return pick(rng, 5) ? unif(rng, 0.3, 0.95) : 1.0; }

}  // namespace

std::vector<Case> thm65(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_indexed("thm65", seed, s.n_points, [&](std::size_t i, Rng& rng, std::vector<Case>& out) {
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const int k = 1 + pick(rng, 3);
    const double gamma = log_unif(rng, 0.2, 5.0);
    const bool lip = i % 2 == 1;
    const double beta = unif(rng, 0.5, 2.0);
    const auto make_g = [&](Eigen::Index m) { return lip ? lipschitz_fn(rng, m, beta) : general_fn(rng, m); };
    const MixtureSpec spec = lip ? probability_family(rng, n, s.dims, k, gamma, false, make_g)
                                 : scaled_family(rng, n, s.dims, k, draw_budget(rng), gamma, make_g);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    digest_spec(d, spec);
    d << x;
    const std::string dg = d.str();

    const MixtureEval mx = mixture_eval(spec, x, opts);
    const MixtureEval cx = comixture_eval(spec, x, opts);
    out.push_back(equal("mixture: direct sum against defining sum", dg, val(mx.direct_sum), val(mx.defining_sum),
                        eq_slack(opts.tol, {val(mx.direct_sum), val(mx.defining_sum)})));
    out.push_back(equal("comixture: direct sum against defining sum", dg, val(cx.direct_sum), val(cx.defining_sum),
                        eq_slack(opts.tol, {val(cx.direct_sum), val(cx.defining_sum)})));

    const double xs = std::max(1.0, x.norm());
    out.push_back(equal("mixture prox against the embedding", dg, 0.0,
                        (mixture_prox(spec, x) - prox_composition(spec.embedded(), x)).norm(), 1e-10 * xs));
    out.push_back(equal("comixture prox against the embedding", dg, 0.0,
                        (comixture_prox(spec, x) - prox_cocomposition(spec.embedded(), x)).norm(), 1e-10 * xs));
    const double env = envelope_cocomposition(spec.embedded(), gamma, x, opts);
    out.push_back(equal("comixture envelope against the embedding", dg, env, comixture_envelope(spec, x),
                        1e-10 * std::max(1.0, std::abs(env))));

    {
      const Vector p = mixture_prox(spec, x);
      const Vector u = (x - p) / gamma;
      const SolveReport f = mixture_eval(spec, p, opts).direct_sum;
      const SolveReport c = mixture_conjugate_eval(spec, u, opts);
      out.push_back(equal("mixture Fenchel-Young equality", dg, p.dot(u), val(f) + val(c), 1e-5 + err(f) + err(c)));
    }
    {
      const Vector p = comixture_prox(spec, x);
      const Vector u = (x - p) / gamma;
      const SolveReport f = comixture_eval(spec, p, opts).direct_sum;
      const SolveReport c = comixture_conjugate_eval(spec, u, opts);
      out.push_back(equal("comixture Fenchel-Young equality", dg, p.dot(u), val(f) + val(c), 1e-5 + err(f) + err(c)));
    }

    if (lip) {
      const Vector dir = gauss(rng, n, 1.5);
      const double t = 1e4;
      const double r = comixture_recession(spec, dir).as_double();
      const double q = (val(comixture_eval(spec, x + t * dir, opts).direct_sum) - val(cx.direct_sum)) / t;
      out.push_back(equal("comixture recession by difference quotient", dg, r, q, 1e-3 * std::max(1.0, std::abs(r))));
      const Vector b = pick(rng, 2) ? Vector(x + gauss(rng, n, 0.1)) : Vector(gauss(rng, n, 1.5));
      const double fb = val(comixture_eval(spec, b, opts).direct_sum);
      const double fa = val(cx.direct_sum);
      out.push_back(at_most("comixture Lipschitz transfer", dg, beta * (x - b).norm(), std::abs(fa - fb),
                            eq_slack(opts.tol, {fa, fb})));
    }

    if (i % 4 == 0) {
      // Two scalar terms: the constraint a1 y1 + a2 y2 = x is a line.
      const double a1 = unif(rng, 0.2, 0.8), a2 = unif(rng, 0.2, 0.8);
      const double l1 = unif(rng, 0.3, 1.0) * (pick(rng, 2) ? 1 : -1);
      const double l2 = unif(rng, 0.3, 1.0);
      const double scale = std::min(1.0, 1.0 / (a1 * l1 * l1 + a2 * l2 * l2));
      const double al1 = a1 * scale, al2 = a2 * scale;
      const ConvexFunction g1 = general_fn(rng, 1), g2 = general_fn(rng, 1);
      const MixtureSpec two({{al1, DenseMap::scalar(l1), g1}, {al2, DenseMap::scalar(l2), g2}}, gamma);
      const double x0 = unif(rng, -2.0, 2.0);
      Digest d2;
      digest_spec(d2, two);
      d2 << x0;
      const double line =
          line_min(
              [&](double y1) {
                const double y2 = (x0 - al1 * l1 * y1) / (al2 * l2);
                return al1 * (g_at(g1, Vector::Constant(1, y1)) + y1 * y1 / (2 * gamma)) +
                       al2 * (g_at(g2, Vector::Constant(1, y2)) + y2 * y2 / (2 * gamma));
              },
              -20.0, 20.0, s.grid_steps, 3)
              .value -
          x0 * x0 / (2 * gamma);
      const MixtureEval m2 = mixture_eval(two, Vector::Constant(1, x0), opts);
      out.push_back(equal("two-term scalar mixture against the constraint line", d2.str(), line, val(m2.direct_sum),
                          1e-6 + err(m2.direct_sum)));
      out.push_back(equal("two-term scalar mixture, defining sum", d2.str(), line, val(m2.defining_sum),
                          1e-6 + err(m2.defining_sum)));
    }
  });
}

std::vector<Case> thm70(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  return run_indexed("thm70", seed, s.n_points, [&](std::size_t i, Rng& rng, std::vector<Case>& out) {
    if (i == 0) {
      const MixtureSpec two({{0.5, DenseMap::scalar(0.9), abs1.translated(make_vector({0.3}))},
                             {0.5, DenseMap::scalar(0.6), ConvexFunction::quadratic(1).translated(make_vector({-0.4}))}},
                            1.0);
      const double x0 = 0.2;
      Digest d;
      digest_spec(d, two);
      d << x0;
      const PcmReport p = pcm_estimate(two, make_vector({x0}), {16, 256, 4096, 65536}, opts, GridSpec{-3, 3, 1501, 3});
      const double ref = line_min(
                             [&](double y1) {
                               const double y2 = (x0 - 0.45 * y1) / 0.3;
                               return 0.5 * std::abs(y1 - 0.3) + 0.25 * (y2 + 0.4) * (y2 + 0.4);
                             },
                             -20.0, 20.0, s.grid_steps, 3)
                             .value;
      out.push_back(equal("large-gamma mixture tail is monotone", d.str(), 1.0, p.monotone ? 1.0 : 0.0, 0.0));
      out.push_back(equal("large-gamma mixture against the weighted infimal postcomposition", d.str(), ref,
                          val(p.tail.back().mixture), 1e-3));
      if (p.oracle) out.push_back(equal("grid estimate of the weighted postcomposition", d.str(), ref, p.oracle->value, 2e-2));
      return;
    }
    if (i == 1) {
      const MixtureSpec m({{0.5, DenseMap::scalar(0.8), abs1.translated(make_vector({1}))},
                           {0.5, DenseMap::scalar(0.6), abs1.translated(make_vector({-1}))}},
                          1.0);
      std::vector<double> gammas;
      for (int k = 0; k <= 12; ++k) gammas.push_back(std::ldexp(1.0, -k));
      const ComixtureArgminSequence seq = comixture_argmin_sequence(m, gammas, opts);
      const double ref = line_min([](double t) { return 0.5 * std::abs(0.8 * t - 1) + 0.5 * std::abs(0.6 * t + 1); },
                                  -20.0, 20.0, s.grid_steps, 3)
                             .value;
      Digest d;
      digest_spec(d, m);
      for (std::size_t k = 1; k < seq.rows.size(); ++k)
        out.push_back(at_least("comixture infima non-decreasing as gamma decreases", d.str(),
                               val(seq.rows[k - 1].report), val(seq.rows[k].report), 1e-8));
      out.push_back(equal("comixture infimum at gamma = 2^-12 against the grid minimum", d.str(), ref,
                          val(seq.rows.back().report), 1e-4));
      return;
    }
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const int k = 1 + pick(rng, 3);
    const double gamma = log_unif(rng, 0.2, 5.0);
    const bool iso = i % 3 == 0;
    const auto make_g = [&](Eigen::Index m) { return general_fn(rng, m); };
    const MixtureSpec spec = iso ? probability_family(rng, n, s.dims, k, gamma, true, make_g)
                                 : scaled_family(rng, n, s.dims, k, draw_budget(rng), gamma, make_g);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    digest_spec(d, spec);
    d << x;
    const std::string dg = d.str();
    const SolveReport co = comixture_eval(spec, x, opts).direct_sum;
    const SolveReport mx = mixture_eval(spec, x, opts).direct_sum;
    out.push_back(at_least("comixture above the weighted envelopes", dg, comixture_envelope(spec, x), val(co),
                           ineq_slack({err(co)})));
    out.push_back(at_most("comixture below the weighted values", dg, sum_values(spec, x), val(co), ineq_slack({err(co)})));
    out.push_back(at_most("comixture below the mixture", dg, val(mx), val(co), ineq_slack({err(co), err(mx)})));
    if (iso) out.push_back(equal("isometries: mixture equals comixture", dg, val(mx), val(co), 1e-6 + err(co) + err(mx)));
  });
}

std::vector<Case> prop75(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_instances("prop75", seed, s.n_points, [&](Rng& rng, std::vector<Case>& out) {
    const int k = 2 + pick(rng, 2);
    const std::vector<double> w = probability_weights(rng, k);
    const double gamma = log_unif(rng, 0.3, 3.0);
    std::vector<MixtureTerm> terms;
    std::vector<Proximable> family;
    for (int j = 0; j < k; ++j) {
      const Eigen::Index m = 1 + pick(rng, std::min(s.dims, 2));
      const DenseMap L = random_map(rng, m, 1, 0.3, 1.0);
      const ConvexFunction g = general_fn(rng, m);
      terms.push_back({w[j], L, g});
      family.push_back(proximable_cocomposition(CompositionSpec(L, g, gamma), opts));
    }
    const MixtureSpec spec(terms, gamma);
    const Vector x = Vector::Constant(1, unif(rng, -2.0, 2.0));
    Digest d;
    digest_spec(d, spec);
    d << x;
    const SolveReport pe = proximal_average_eval(w, family, x, opts);
    const SolveReport co = comixture_eval(spec, x, opts).direct_sum;
    out.push_back(equal("proximal average of cocompositions is the comixture", d.str(), val(co), val(pe),
                        std::max(1e-5, eq_slack(opts.tol, {val(co), val(pe)}))));
  });
}

std::vector<Case> prop79(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  const ConvexFunction q1 = ConvexFunction::quadratic(1);
  return run_indexed("prop79", seed, s.n_points, [&](std::size_t i, Rng& rng, std::vector<Case>& out) {
    if (i == 0) {
      const MixtureSpec pa({{0.5, DenseMap::identity(1), abs1}, {0.5, DenseMap::identity(1), q1}}, 1.0);
      out.push_back(equal("proximal average prox example", "abs-q-average", 1.0, mixture_prox(pa, make_vector({2}))[0], 0.0));

      const FunctionSampler coin = [&](std::mt19937_64& g) { return std::bernoulli_distribution(0.5)(g) ? abs1 : q1; };
      const Vector x = make_vector({0.9});
      const SampledProx sp = sampled_expectation_prox(coin, seed, 10000, 1.5, x);
      const double ref = enumerated_expectation_prox({0.5, 0.5}, {abs1, q1}, 1.5, x)[0];
      out.push_back(within("sampled two-atom expectation within 3 standard errors", "coin", -3 * sp.std_error[0],
                           3 * sp.std_error[0], sp.mean[0] - ref, 1e-12));
      return;
    }
    if (i == 1) {
      std::vector<ConvexFunction> fam;
      std::vector<MixtureTerm> terms;
      for (double om : {-1.0, 0.0, 1.0}) {
        fam.push_back(abs1.translated(make_vector({om})));
        terms.push_back({1.0 / 3.0, DenseMap::identity(1), fam.back()});
      }
      const MixtureSpec three(terms, 0.8);
      const FunctionSampler shifts = [&](std::mt19937_64& g) {
        return fam[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 2)(g))];
      };
      for (double x0 : {-2.0, 0.3, 1.7}) {
        const Vector xv = make_vector({x0});
        Digest d;
        d << "shifted-abs" << x0;
        const double en = enumerated_expectation_prox({1.0 / 3, 1.0 / 3, 1.0 / 3}, fam, 0.8, xv)[0];
        out.push_back(equal("enumerated expectation equals the mixture prox", d.str(), mixture_prox(three, xv)[0], en, 0.0));
        const SampledProx sp = sampled_expectation_prox(shifts, seed, 10000, 0.8, xv);
        out.push_back(within("sampled shifted expectation within 3 standard errors", d.str(), -3 * sp.std_error[0],
                             3 * sp.std_error[0], sp.mean[0] - en, 1e-12));
      }
      return;
    }
    const Eigen::Index n = 1 + pick(rng, s.dims);
    const int k = 2 + pick(rng, 2);
    const std::vector<double> w = probability_weights(rng, k);
    const double gamma = log_unif(rng, 0.3, 3.0);
    const bool lip = i % 2 == 1;
    std::vector<ConvexFunction> fam;
    std::vector<Proximable> prox_fam;
    std::vector<MixtureTerm> terms;
    for (int j = 0; j < k; ++j) {
      fam.push_back(lip ? lipschitz_fn(rng, n, unif(rng, 0.5, 2.0)) : general_fn(rng, n));
      prox_fam.push_back(proximable(fam.back(), gamma));
      terms.push_back({w[j], DenseMap::identity(static_cast<int>(n)), fam.back()});
    }
    const MixtureSpec spec(terms, gamma);
    const Vector x = gauss(rng, n, 1.5);
    Digest d;
    digest_spec(d, spec);
    d << x;
    const std::string dg = d.str();

    const SolveReport pe = proximal_average_eval(w, prox_fam, x, opts);
    const SolveReport mx = mixture_eval(spec, x, opts).defining_sum;
    const SolveReport cx = comixture_eval(spec, x, opts).defining_sum;
    out.push_back(equal("proximal average equals the mixture", dg, val(mx), val(pe),
                        std::max(1e-5, eq_slack(opts.tol, {val(mx), val(pe)}))));
    out.push_back(equal("proximal average equals the comixture", dg, val(cx), val(pe),
                        std::max(1e-5, eq_slack(opts.tol, {val(cx), val(pe)}))));
    const Vector en = enumerated_expectation_prox(w, fam, gamma, x);
    out.push_back(equal("prox of the proximal average is the averaged prox", dg, 0.0, (en - mixture_prox(spec, x)).norm(),
                        0.0));

    const Vector p = mixture_prox(spec, x);
    const Vector u = (x - p) / gamma;
    const SolveReport fp = proximal_average_eval(w, prox_fam, p, opts);
    const SolveReport cu = comixture_conjugate_eval(spec, u, opts);
    out.push_back(equal("proximal average Fenchel-Young equality", dg, p.dot(u), val(fp) + val(cu),
                        1e-5 + err(fp) + err(cu)));

    if (lip) {
      const Vector dir = gauss(rng, n, 1.5);
      double want = 0.0;
      for (int j = 0; j < k; ++j) want += w[j] * recession_eval(fam[j], dir).as_double();
      const double r = comixture_recession(spec, dir).as_double();
      out.push_back(equal("recession of the proximal average is the weighted sum", dg, want, r,
                          1e-12 * std::max(1.0, std::abs(want))));
      const double t = 1e4;
      const double q = (val(proximal_average_eval(w, prox_fam, x + t * dir, opts)) - val(pe)) / t;
      out.push_back(equal("proximal average recession by difference quotient", dg, want, q,
                          1e-3 * std::max(1.0, std::abs(want))));
    }
  });
}

std::vector<Case> prop80(std::uint64_t seed, const Scale& s) {
  const SolverOpts opts;
  return run_indexed("prop80", seed, s.n_points, [&](std::size_t i, Rng& rng, std::vector<Case>& out) {
    const bool lip = i % 2 == 0;
    const std::vector<double> w = probability_weights(rng, 2);
    const double gamma = log_unif(rng, 0.3, 3.0);
    std::vector<ConvexFunction> fam;
    std::vector<double> betas;
    for (int j = 0; j < 2; ++j) {
      betas.push_back(unif(rng, 0.5, 2.0));
      fam.push_back(lip ? lipschitz_fn(rng, 1, betas.back()) : coercive_fn(rng, 1, 0.3));
    }
    auto family_at = [&](double gm) { return std::vector<Proximable>{proximable(fam[0], gm), proximable(fam[1], gm)}; };
    const double x0 = lip ? unif(rng, -2.0, 2.0) : unif(rng, -1.0, 1.0);
    const Vector x = Vector::Constant(1, x0);
    Digest d;
    d << fam[0] << fam[1] << w[0] << w[1] << gamma << x0;
    const std::string dg = d.str();
    auto f_at = [&](int j, double t) { return g_at(fam[j], Vector::Constant(1, t)); };

    const SolveReport pe = proximal_average_eval(w, family_at(gamma), x, opts);
    const double envs = w[0] * envelope(fam[0], gamma, x) + w[1] * envelope(fam[1], gamma, x);
    const double vals = w[0] * f_at(0, x0) + w[1] * f_at(1, x0);
    const double pex =
        line_min([&](double y1) { return w[0] * f_at(0, y1) + w[1] * f_at(1, (x0 - w[0] * y1) / w[1]); }, -20.0, 20.0,
                 s.grid_steps, 3)
            .value;
    out.push_back(at_least("proximal average above the averaged envelopes", dg, envs, val(pe), ineq_slack({err(pe)})));
    out.push_back(at_most("proximal average below the averaged values", dg, vals, val(pe), ineq_slack({err(pe)})));
    out.push_back(at_least("proximal average above the weighted infimal convolution", dg, pex, val(pe),
                           ineq_slack({err(pe)})));
    if (lip) {
      const double small = std::ldexp(1.0, -12);
      const SolveReport ps = proximal_average_eval(w, family_at(small), x, opts);
      const double bound = small * (w[0] * betas[0] * betas[0] + w[1] * betas[1] * betas[1]) / 2;
      out.push_back(within("small-gamma proximal average tends to the averaged values", dg, -bound - 1e-6, bound,
                           vals - val(ps), 1e-6));
    } else {
      const SolveReport pb = proximal_average_eval(w, family_at(std::ldexp(1.0, 12)), x, opts);
      out.push_back(equal("large-gamma proximal average tends to the weighted infimal convolution", dg, pex, val(pb),
                          1e-3));
    }
  });
}

}  // namespace proxkit::verify::suites
