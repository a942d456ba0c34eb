#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "proxkit/mixture.hpp"

using namespace proxkit;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(2024);
  return r;
}

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

ConvexFunction pick_function(int m, int which) {
  const Vector c = oracle::random_vec(rng(), m, 0.5);
  switch (which % 6) {
    case 0: return ConvexFunction::l1_norm(m);
    case 1: return ConvexFunction::eucl_norm(m).translated(c);
    case 2: return ConvexFunction::quadratic(m).translated(c);
    case 3: return ConvexFunction::dist_ball(c, 0.4);
    case 4: return ConvexFunction::support_ball(c, 0.7);
    default: return ConvexFunction::l1_norm(m).translated(c).plus_quadratic(0.5);
  }
}

// Random family on R^n with budget 0.95 or less.
MixtureSpec random_mixture(int n, double gamma) {
  const int p = 1 + static_cast<int>(rng()() % 3);
  std::vector<double> alpha;
  std::vector<Matrix> ls;
  double budget = 0.0;
  for (int k = 0; k < p; ++k) {
    const int m = 1 + static_cast<int>(rng()() % 2);
    alpha.push_back(uniform(0.2, 1.5));
    ls.push_back(oracle::random_mat(rng(), m, n));
    const double s = oracle::spectral_norm(ls.back());
    budget += alpha.back() * s * s;
  }
  const double scale = std::sqrt(uniform(0.3, 0.95) / budget);
  std::vector<MixtureTerm> terms;
  for (int k = 0; k < p; ++k) {
    const Matrix l = scale * ls[k];
    terms.push_back(MixtureTerm{alpha[k], DenseMap(l), pick_function(static_cast<int>(l.rows()), static_cast<int>(rng()() % 6))});
  }
  return MixtureSpec(terms, gamma);
}

double value(const SolveReport& r) {
  REQUIRE(r.status == SolveStatus::Converged);
  return r.value.value();
}

const ConvexFunction kAbs = ConvexFunction::l1_norm(1);
const ConvexFunction kQ = ConvexFunction::quadratic(1);

MixtureSpec average_abs_q(double gamma = 1.0) {
  return MixtureSpec({{0.5, DenseMap::identity(1), kAbs}, {0.5, DenseMap::identity(1), kQ}}, gamma);
}

}  // namespace

TEST_CASE("mixture spec validation") {
  CHECK_THROWS_AS(MixtureSpec({}, 1.0), ParameterError);
  CHECK_THROWS_AS(MixtureSpec({{0.8, DenseMap::identity(1), kAbs}, {0.8, DenseMap::identity(1), kAbs}}, 1.0),
                  AdmissibilityError);
  CHECK_THROWS_AS(MixtureSpec({{-0.5, DenseMap::identity(1), kAbs}}, 1.0), ParameterError);
  CHECK_THROWS_AS(MixtureSpec({{0.5, DenseMap::identity(1), kAbs}, {0.5, DenseMap::identity(2), ConvexFunction::l1_norm(2)}}, 1.0),
                  DimensionError);
  CHECK_THROWS_AS(MixtureSpec({{0.5, DenseMap::identity(2), kAbs}}, 1.0), DimensionError);
  CHECK_THROWS_AS(MixtureSpec({{0.5, DenseMap::identity(1), kAbs}}, 0.0), ParameterError);
  CHECK_NOTHROW(MixtureSpec({{0.5, DenseMap::identity(1), kAbs}, {0.5, DenseMap::identity(1), kAbs}}, 1.0));
}

TEST_CASE("direct-sum embedding") {
  const MixtureSpec one({{1.0, DenseMap::identity(2), ConvexFunction::eucl_norm(2)}}, 1.0);
  const DirectSumEmbedding e1 = embed(one);
  CHECK(e1.stacked_map.matrix().isApprox(Matrix::Identity(2, 2)));
  for (int k = 0; k < 10; ++k) {
    const Vector y = oracle::random_vec(rng(), 2, 2);
    CHECK(eval(e1.stacked_fun, y).value() == doctest::Approx(y.norm()));
  }
  const DirectSumEmbedding e2 = embed(average_abs_q());
  const double r = 1 / std::sqrt(2.0);
  CHECK((e2.stacked_map.matrix() - Matrix::Constant(2, 1, r)).norm() <= 1e-15);
  for (int k = 0; k < 20; ++k) {
    const Vector y = oracle::random_vec(rng(), 2, 2);
    const double want = 0.5 * std::abs(std::sqrt(2.0) * y[0]) + 0.5 * 0.5 * 2.0 * y[1] * y[1];
    CHECK(std::abs(eval(e2.stacked_fun, y).value() - want) <= 1e-12);
    // Block prox: sqrt(a) prox(g, gamma, y / sqrt(a)).
    const Vector p = prox(e2.stacked_fun, 0.7, y);
    CHECK(std::abs(p[0] - r * prox(kAbs, 0.7, make_vector({y[0] / r}))[0]) <= 1e-12);
    CHECK(std::abs(p[1] - r * prox(kQ, 0.7, make_vector({y[1] / r}))[0]) <= 1e-12);
  }
  for (int k = 0; k < 20; ++k) {
    const MixtureSpec s = random_mixture(2, 1.0);
    const double n = oracle::spectral_norm(embed(s).stacked_map.matrix());
    CHECK(n * n <= s.budget() + 1e-9);
  }
}

TEST_CASE("mixture and comixture values") {
  const MixtureSpec one({{1.0, DenseMap::identity(1), kAbs.translated(make_vector({0.5}))}}, 0.8);
  for (double x : {-1.0, 0.2, 3.0}) {
    const MixtureEval m = mixture_eval(one, make_vector({x}));
    CHECK(std::abs(value(m.direct_sum) - std::abs(x - 0.5)) <= 1e-6);
    CHECK(std::abs(value(m.defining_sum) - std::abs(x - 0.5)) <= 1e-6);
  }
  // Proximal average: both sides agree and match a 1-D fibre oracle.
  for (double gamma : {0.5, 1.0, 2.0}) {
    const MixtureSpec pa = average_abs_q(gamma);
    for (double x : {-2.0, 0.3, 1.0, 2.5}) {
      const auto [v, arg] = oracle::min1d(
          [&](double y1) {
            const double y2 = 2 * x - y1;
            return 0.5 * (std::abs(y1) + y1 * y1 / (2 * gamma)) + 0.5 * (y2 * y2 / 2 + y2 * y2 / (2 * gamma));
          },
          -10, 10, 1e-3);
      (void)arg;
      const double want = v - x * x / (2 * gamma);
      const MixtureEval m = mixture_eval(pa, make_vector({x}));
      const MixtureEval c = comixture_eval(pa, make_vector({x}));
      CHECK(std::abs(value(m.direct_sum) - want) <= 1e-7);
      CHECK(std::abs(value(m.defining_sum) - want) <= 1e-7);
      CHECK(std::abs(value(c.direct_sum) - want) <= 1e-7);
      CHECK(std::abs(value(c.defining_sum) - want) <= 1e-7);
    }
  }
}

TEST_CASE("two-term scalar mixture against a constrained 2-D grid") {
  // alpha_1 l_1 = alpha_2 l_2, so the feasible line y1 + y2 = x / 0.45 runs through cell centres.
  const double gamma = 0.6;
  const MixtureSpec s({{0.5, DenseMap::scalar(0.9), kAbs.translated(make_vector({0.3}))},
                       {0.5, DenseMap::scalar(0.9), kQ.translated(make_vector({-0.4}))}},
                      gamma);
  const double h = 0.003;
  for (int j : {-300, 100, 500}) {
    // Cell centres lo + (i + 1/2) h with lo = -3 - h/2 give y1 + y2 = -6 + (i + i') h.
    const double target = -6.0 + (2000 + j) * h;
    const double x = 0.45 * target;
    GridProblem gp;
    gp.dim = 2;
    gp.point = make_vector({x});
    gp.op = DenseMap(Matrix::Constant(2, 1, 0.45));
    gp.constraint_tol = 1e-9;
    gp.f = [&](const Vector& y) {
      return 0.5 * (std::abs(y[0] - 0.3) + y[0] * y[0] / (2 * gamma)) +
             0.5 * ((y[1] + 0.4) * (y[1] + 0.4) / 2 + y[1] * y[1] / (2 * gamma));
    };
    const GridResult gr = grid_oracle(GridKind::ConstrainedMin, gp, {-3 - h / 2, -3 - h / 2 + 2001 * h, 2001});
    REQUIRE(std::isfinite(gr.value));
    const double want = gr.value - x * x / (2 * gamma);
    const MixtureEval m = mixture_eval(s, make_vector({x}));
    CHECK(std::abs(value(m.direct_sum) - want) <= 1e-4);
    CHECK(std::abs(value(m.defining_sum) - want) <= 1e-4);
  }
}

TEST_CASE("reduction consistency on random families") {
  SolverOpts opts;
  for (int k = 0; k < 40; ++k) {
    const MixtureSpec s = random_mixture(1 + k % 2, uniform(0.3, 3.0));
    const Vector x = oracle::random_vec(rng(), static_cast<int>(s.dim()), 2);
    const MixtureEval c = comixture_eval(s, x, opts);
    CHECK(c.discrepancy <= 2 * opts.tol * std::max(1.0, std::abs(value(c.direct_sum))));
    const MixtureEval m = mixture_eval(s, x, opts);
    if (m.direct_sum.value.is_finite()) {
      CHECK(m.discrepancy <= 2 * opts.tol * std::max(1.0, std::abs(value(m.direct_sum))));
    } else {
      CHECK(m.defining_sum.value.is_infinite());
    }
  }
}

TEST_CASE("prox decomposition and examples") {
  const MixtureSpec pa = average_abs_q();
  CHECK(mixture_prox(pa, make_vector({2}))[0] == 1.0);
  CHECK(comixture_prox(pa, make_vector({2}))[0] == 1.0);
  const MixtureSpec one({{1.0, DenseMap::identity(2), ConvexFunction::eucl_norm(2)}}, 1.3);
  const Vector x1 = make_vector({2, -1});
  CHECK((mixture_prox(one, x1) - prox(ConvexFunction::eucl_norm(2), 1.3, x1)).norm() <= 1e-15);
  for (int k = 0; k < 50; ++k) {
    const MixtureSpec s = random_mixture(2, uniform(0.2, 4));
    const Vector x = oracle::random_vec(rng(), 2, 3);
    CHECK((mixture_prox(s, x) - prox_composition(s.embedded(), x)).norm() <= 1e-10);
    CHECK((comixture_prox(s, x) - prox_cocomposition(s.embedded(), x)).norm() <= 1e-10);
    CHECK(std::abs(comixture_envelope(s, x) - envelope_cocomposition(s.embedded(), s.gamma(), x)) <= 1e-10);
  }
  // Grid prox of the numerically evaluated comixture.
  const MixtureSpec s({{0.6, DenseMap::scalar(0.8), kAbs.translated(make_vector({1}))},
                       {0.4, DenseMap::scalar(-0.5), kQ}},
                      0.9);
  for (double x0 : {2.5, -1.0}) {
    const auto [v, p] = oracle::scan1d(
        [&](double y) { return s.gamma() * value(comixture_eval(s, make_vector({y})).defining_sum) + (x0 - y) * (x0 - y) / 2; },
        x0 - 3, x0 + 3, 1e-3);
    (void)v;
    CHECK(std::abs(comixture_prox(s, make_vector({x0}))[0] - p) <= 2e-3);
  }
}

TEST_CASE("comixture envelope") {
  const MixtureSpec one({{1.0, DenseMap::identity(1), kAbs}}, 1.0);
  CHECK(comixture_envelope(one, make_vector({3})) == doctest::Approx(2.5));
  // Two-term Huber sum against a Moreau infimum of the evaluated comixture.
  const MixtureSpec s({{0.5, DenseMap::scalar(0.9), kAbs.translated(make_vector({1}))},
                       {0.5, DenseMap::scalar(0.7), kAbs.translated(make_vector({-1}))}},
                      0.8);
  for (double x0 : {-2.0, 0.4, 3.0}) {
    const auto [v, arg] = oracle::min1d(
        [&](double u) {
          return value(comixture_eval(s, make_vector({u})).defining_sum) + (x0 - u) * (x0 - u) / (2 * s.gamma());
        },
        x0 - 4, x0 + 4, 1e-2);
    (void)arg;
    CHECK(std::abs(comixture_envelope(s, make_vector({x0})) - v) <= 1e-5);
  }
}

TEST_CASE("comixture argmin") {
  const MixtureSpec q({{1.0, DenseMap::scalar(0.8), kQ.translated(make_vector({0.4}))}}, 1.0);
  const SolveReport rq = comixture_argmin(q);
  REQUIRE(rq.status == SolveStatus::Converged);
  CHECK(std::abs((*rq.argpoint)[0] - 0.5) <= 1e-8);

  const MixtureSpec pair({{0.5, DenseMap::identity(1), kAbs.translated(make_vector({1}))},
                          {0.5, DenseMap::identity(1), kAbs.translated(make_vector({-1}))}},
                         1.0);
  const SolveReport r = comixture_argmin(pair);
  REQUIRE(r.status == SolveStatus::Converged);
  const double xs = (*r.argpoint)[0];
  const auto avg = [](double x) { return 0.5 * std::abs(x - 1) + 0.5 * std::abs(x + 1); };
  const auto [gmin, garg] = oracle::scan1d(avg, -3, 3, 1e-3);
  (void)garg;
  CHECK(std::abs(avg(xs) - gmin) <= 1e-6);
  const auto [emin, earg] = oracle::min1d([&](double x) { return comixture_envelope(pair, make_vector({x})); }, -3, 3, 1e-3);
  (void)earg;
  CHECK(std::abs(r.value.value() - emin) <= 1e-6);

  std::vector<double> gammas;
  for (int n = 0; n <= 12; ++n) gammas.push_back(std::ldexp(1.0, -n));
  const MixtureSpec m({{0.5, DenseMap::scalar(0.8), kAbs.translated(make_vector({1}))},
                       {0.5, DenseMap::scalar(0.6), kAbs.translated(make_vector({-1}))}},
                      1.0);
  const ComixtureArgminSequence seq = comixture_argmin_sequence(m, gammas);
  CHECK(seq.nondecreasing);
  const auto [ref, rarg] = oracle::min1d(
      [](double x) { return 0.5 * std::abs(0.8 * x - 1) + 0.5 * std::abs(0.6 * x + 1); }, -10, 10, 1e-3);
  (void)rarg;
  CHECK(std::abs(seq.rows.back().report.value.value() - ref) <= 1e-4);
  CHECK(std::abs(seq.reference - ref) <= 1e-6);

  const MixtureSpec flat({{1.0, DenseMap::scalar(0.5), ConvexFunction::affine(make_vector({1}), 0)}}, 1.0);
  CHECK(comixture_argmin(flat).status == SolveStatus::Diverged);
}

TEST_CASE("comixture recession") {
  const MixtureSpec s({{0.4, DenseMap::from_rows({{0.5, 0.2}, {0.1, -0.6}}), ConvexFunction::eucl_norm(2)},
                       {0.6, DenseMap::from_rows({{0.3, 0.7}}), ConvexFunction::l1_norm(1)}},
                      1.0);
  for (int k = 0; k < 10; ++k) {
    const Vector x = oracle::random_vec(rng(), 2, 2);
    const Vector a = s.terms()[0].op.matrix() * x;
    const Vector b = s.terms()[1].op.matrix() * x;
    const double want = 0.4 * a.norm() + 0.6 * b.lpNorm<1>();
    CHECK(comixture_recession(s, x).value() == doctest::Approx(want).epsilon(1e-12));
    const double t = 1e6;
    const double dq = (value(comixture_eval(s, t * x).defining_sum) - value(comixture_eval(s, Vector::Zero(2)).defining_sum)) / t;
    CHECK(std::abs(dq - want) <= 1e-3 * want);
  }
  const MixtureSpec pa = average_abs_q();
  CHECK(comixture_recession(pa, make_vector({2})).is_infinite());
  const MixtureSpec pn({{0.5, DenseMap::identity(1), kAbs}, {0.5, DenseMap::identity(1), ConvexFunction::eucl_norm(1)}}, 1.0);
  CHECK(comixture_recession(pn, make_vector({-3})).value() == doctest::Approx(3.0));
}

TEST_CASE("large-gamma mixture estimate") {
  const MixtureSpec one({{1.0, DenseMap::scalar(0.5), kAbs}}, 1.0);
  const PcmReport r = pcm_estimate(one, make_vector({0.5}), {4, 64, 1024, 16384});
  CHECK(r.monotone);
  CHECK(std::abs(r.tail.back().mixture.value.value() - 1.0) <= 1e-3);
  const MixtureSpec two({{0.5, DenseMap::scalar(0.9), kAbs.translated(make_vector({0.3}))},
                         {0.5, DenseMap::scalar(0.6), kQ.translated(make_vector({-0.4}))}},
                        1.0);
  const PcmReport p = pcm_estimate(two, make_vector({0.2}), {16, 256, 4096, 65536}, {}, GridSpec{-3, 3, 1501, 3});
  CHECK(p.monotone);
  REQUIRE(p.gap);
  // Independent 1-D reference on the line 0.45 y1 + 0.3 y2 = 0.2.
  const auto [v, arg] = oracle::min1d(
      [](double y1) {
        const double y2 = (0.2 - 0.45 * y1) / 0.3;
        return 0.5 * std::abs(y1 - 0.3) + 0.25 * (y2 + 0.4) * (y2 + 0.4);
      },
      -5, 5, 1e-3);
  (void)arg;
  CHECK(std::abs(p.tail.back().mixture.value.value() - v) <= 1e-3);
  CHECK(std::abs(p.oracle->value - v) <= 2e-2);
  const MixtureSpec wide({{0.5, DenseMap::from_rows({{1}, {0}}), ConvexFunction::l1_norm(2)}, {0.5, DenseMap::scalar(1), kAbs}}, 1.0);
  CHECK_THROWS_AS(pcm_estimate(wide, make_vector({0.1}), {1, 2}, {}, GridSpec{}), UnsupportedDimension);
}

TEST_CASE("order, sandwich and isometry relations") {
  for (int k = 0; k < 30; ++k) {
    const MixtureSpec s = random_mixture(2, uniform(0.3, 3));
    const Vector x = oracle::random_vec(rng(), 2, 2);
    const double co = value(comixture_eval(s, x).direct_sum);
    double upper = 0.0;
    for (const MixtureTerm& t : s.terms()) upper += t.alpha * eval(t.fn, apply(t.op, x)).value();
    CHECK(comixture_envelope(s, x) - 1e-6 <= co);
    CHECK(co <= upper + 1e-6);
    const SolveReport mx = mixture_eval(s, x).direct_sum;
    if (mx.value.is_finite()) CHECK(co <= mx.value.value() + 1e-6);
  }
  // Probability weights and isometries.
  const double c = std::cos(0.7), sn = std::sin(0.7);
  const MixtureSpec iso({{0.3, DenseMap::from_rows({{c, -sn}, {sn, c}}), ConvexFunction::l1_norm(2)},
                         {0.7, DenseMap::identity(2), ConvexFunction::eucl_norm(2).translated(make_vector({1, 0}))}},
                        1.1);
  for (int k = 0; k < 10; ++k) {
    const Vector x = oracle::random_vec(rng(), 2, 2);
    CHECK(std::abs(value(mixture_eval(iso, x).direct_sum) - value(comixture_eval(iso, x).direct_sum)) <= 1e-6);
  }
}

TEST_CASE("conjugate pairs at prox witnesses") {
  for (int k = 0; k < 20; ++k) {
    const MixtureSpec s = random_mixture(2, uniform(0.3, 3));
    const Vector x = oracle::random_vec(rng(), 2, 2);
    const Vector p = mixture_prox(s, x);
    const Vector u = (x - p) / s.gamma();
    const SolveReport mp = mixture_eval(s, p).direct_sum, mc = mixture_conjugate_eval(s, u);
    INFO(to_string(mp.status), " ", to_string(mc.status), " ", mp.residual, " ", mc.residual);
    const double lhs = value(mp) + value(mc);
    CHECK(std::abs(lhs - p.dot(u)) <= 1e-5);
    const Vector q = comixture_prox(s, x);
    const Vector v = (x - q) / s.gamma();
    const double lhs2 = value(comixture_eval(s, q).direct_sum) + value(comixture_conjugate_eval(s, v));
    CHECK(std::abs(lhs2 - q.dot(v)) <= 1e-5);
    // Fenchel-Young inequality away from the witness.
    const Vector w = v + oracle::random_vec(rng(), 2, 0.5);
    CHECK(value(comixture_eval(s, q).direct_sum) + comixture_conjugate_eval(s, w).value.as_double() >= q.dot(w) - 1e-6);
  }
}

TEST_CASE("proximal averages of cocompositions") {
  const std::vector<double> w{0.3, 0.7};
  const CompositionSpec a(DenseMap::scalar(0.8), kAbs.translated(make_vector({0.5})), 0.9);
  const CompositionSpec b(DenseMap::scalar(-0.6), kQ.translated(make_vector({1.0})), 0.9);
  const MixtureSpec s({{0.3, a.op(), a.fn()}, {0.7, b.op(), b.fn()}}, 0.9);
  for (double x : {-1.5, 0.0, 0.8, 2.0}) {
    const Vector xv = make_vector({x});
    const SolveReport pe = proximal_average_eval(w, {proximable_cocomposition(a), proximable_cocomposition(b)}, xv);
    CHECK(std::abs(value(pe) - value(comixture_eval(s, xv).direct_sum)) <= 1e-5);
  }
  // Identity operators: the proximal average equals both mixtures.
  const MixtureSpec pa = average_abs_q(1.3);
  const Vector x = make_vector({0.7});
  const SolveReport pe = proximal_average_eval({0.5, 0.5}, {proximable(kAbs, 1.3), proximable(kQ, 1.3)}, x);
  CHECK(std::abs(value(pe) - value(mixture_eval(pa, x).direct_sum)) <= 1e-7);
}

TEST_CASE("sampled proximal expectation") {
  const Vector x = make_vector({2});
  const SampledProx one = sampled_expectation_prox([](std::mt19937_64&) { return kAbs; }, 5, 10, 1.0, x);
  CHECK(one.mean[0] == doctest::Approx(1.0));
  CHECK(one.std_error[0] == 0.0);
  const FunctionSampler coin = [](std::mt19937_64& g) { return std::bernoulli_distribution(0.5)(g) ? kAbs : kQ; };
  const SampledProx s = sampled_expectation_prox(coin, 11, 10000, 1.5, make_vector({0.9}));
  const double ref = mixture_prox(average_abs_q(1.5), make_vector({0.9}))[0];
  CHECK(std::abs(s.mean[0] - ref) <= 3 * s.std_error[0]);
  const SampledProx again = sampled_expectation_prox(coin, 11, 10000, 1.5, make_vector({0.9}));
  CHECK(again.mean[0] == s.mean[0]);

  std::vector<ConvexFunction> fam;
  std::vector<MixtureTerm> terms;
  for (double om : {-1.0, 0.0, 1.0}) {
    fam.push_back(kAbs.translated(make_vector({om})));
    terms.push_back({1.0 / 3.0, DenseMap::identity(1), fam.back()});
  }
  const MixtureSpec three(terms, 0.8);
  for (double x0 : {-2.0, 0.3, 1.7}) {
    const Vector xv = make_vector({x0});
    CHECK(enumerated_expectation_prox({1.0 / 3, 1.0 / 3, 1.0 / 3}, fam, 0.8, xv)[0] == mixture_prox(three, xv)[0]);
  }
  CHECK_THROWS_AS(sampled_expectation_prox(coin, 1, 1, 1.0, x), ParameterError);
}
