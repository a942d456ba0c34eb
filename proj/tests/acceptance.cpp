// One line per acceptance criterion. Usage: acceptance <path to the proxkit executable>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "json.hpp"
#include "proxkit/mixture.hpp"
#include "proxkit/proxcomp.hpp"
#include "proxkit/verify.hpp"

using namespace proxkit;

namespace {

constexpr std::uint64_t kSeed = 7;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back(note + (ok ? "" : " [FAIL]"));
  }
};

std::string num(double v, int digits = 3) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Minimum of a convex function of one variable: coarse scan, then a scan with
// step `step` over the two coarse cells around the coarse minimizer.
std::pair<double, double> scan_min(const std::function<double(double)>& f, double lo, double hi, double step) {
  const double coarse = 50 * step;
  double best = kInf, arg = lo;
  for (double t = lo; t <= hi + 1e-12; t += coarse) {
    const double v = f(t);
    if (v < best) best = v, arg = t;
  }
  const double c = arg;
  for (long k = -50; k <= 50; ++k) {
    const double t = c + static_cast<double>(k) * step;
    const double v = f(t);
    if (v < best) best = v, arg = t;
  }
  return {best, arg};
}

struct SuiteStats {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double seconds = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_label;  // label -> (cases, failures)
};

SuiteStats suite(const std::string& id) {
  const verify::SuiteReport r = verify::run_suite(id, kSeed);
  SuiteStats s;
  s.cases = r.cases.size();
  s.failures = r.failures();
  s.seconds = r.elapsed_seconds;
  for (const auto& c : r.cases) {
    auto& e = s.by_label[c.label];
    ++e.first;
    e.second += !c.pass;
  }
  return s;
}

void suite_line(Outcome& o, const std::string& id, std::size_t min_cases, const SuiteStats& s) {
  o.check(s.failures == 0 && s.cases >= min_cases,
          id + " " + std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases) + " cases");
}

void label_line(Outcome& o, const SuiteStats& s, const std::string& label, std::size_t min_cases) {
  auto it = s.by_label.find(label);
  const std::size_t n = it == s.by_label.end() ? 0 : it->second.first;
  const std::size_t f = it == s.by_label.end() ? 0 : it->second.second;
  o.check(n >= min_cases && f == 0, "'" + label + "' " + std::to_string(n - f) + "/" + std::to_string(n));
}

int run_command(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector random_vec(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

double spectral_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.2, 5.0);

  // Moreau decomposition x = prox(f, g, x) + g prox(f*, 1/g, x/g).
  double moreau = 0;
  std::size_t atoms = 0;
  for (int n : {1, 2, 3}) {
    for (const auto& a : testcat::atoms(n)) {
      ++atoms;
      for (int k = 0; k < 100; ++k) {
        const Vector x = random_vec(rng, n, 2.0);
        const double gm = u(rng);
        const Vector back = prox(a.f, gm, x) + gm * prox_conjugate(a.f, 1.0 / gm, x / gm);
        moreau = std::max(moreau, (back - x).cwiseAbs().maxCoeff());
      }
    }
  }
  o.check(moreau <= 1e-9, "Moreau decomposition on " + std::to_string(atoms) + " atoms x 100 points: max err " +
                              num(moreau) + " (tol 1e-9)");

  // Closed-form proxes against a definitional grid argmin, step 1e-3.
  const double step = 1e-3;
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  const std::vector<ConvexFunction> gs{abs1, abs1.translated(make_vector({1.0})),
                                       ConvexFunction::dist_ball(make_vector({0.0}), 0.5),
                                       ConvexFunction::quadratic(1).translated(make_vector({-1.0}))};
  double prox_gap = 0;
  int instances = 0;
  for (double l : {0.5, 0.8, 1.0}) {
    for (const auto& g : gs) {
      for (double gm : {0.5, 2.0}) {
        const CompositionSpec spec(DenseMap::scalar(l), g, gm);
        for (double x0 : {-3.0, 0.7, 4.0}) {
          ++instances;
          const Vector x = make_vector({x0});
          // argmin f(y) + |x - y|^2 / (2 gamma)
          auto obj_scaled = [&](bool co) {
            return [&, co](double y) {
              const Vector v = make_vector({y});
              const double f = (co ? eval_cocomposition(spec, v) : eval_composition(spec, v)).value.as_double();
              return f + (x0 - y) * (x0 - y) / (2 * gm);
            };
          };
          const double pc = scan_min(obj_scaled(false), x0 - 6, x0 + 6, step).second;
          const double po = scan_min(obj_scaled(true), x0 - 6, x0 + 6, step).second;
          prox_gap = std::max(prox_gap, std::abs(prox_composition(spec, x)[0] - pc));
          prox_gap = std::max(prox_gap, std::abs(prox_cocomposition(spec, x)[0] - po));
        }
      }
    }
  }
  o.check(prox_gap <= 2 * step, "closed-form proxes vs grid argmin on " + std::to_string(instances) +
                                    " 1-D instances: max gap " + num(prox_gap) + " (tol 2e-3)");

  SuiteStats ep = suite("ex-proj");
  o.check(ep.failures == 0 && ep.by_label["composition on V is the norm"].first >= 50 &&
              ep.by_label["cocomposition is the norm of the projection"].first >= 50,
          "projection example, both equalities on 50 points: " + std::to_string(ep.cases - ep.failures) + "/" +
              std::to_string(ep.cases) + " (slack 1e-9)");

  // Mixture proxes: weighted finite sums against the library and the embedding.
  double mix_gap = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<MixtureTerm> terms;
    double budget = 0;
    for (int t = 0; t < k; ++t) {
      const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 3);
      Matrix a(m, n);
      for (Eigen::Index r = 0; r < m; ++r) a.row(r) = random_vec(rng, n, 1.0).transpose();
      a /= spectral_norm(a);
      const auto cat = testcat::atoms(static_cast<int>(m));
      const double alpha = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
      budget += alpha;
      terms.push_back(MixtureTerm{alpha, DenseMap(a), cat[rng() % cat.size()].f});
    }
    const double scale = std::uniform_real_distribution<double>(0.3, 0.95)(rng) / budget;
    for (auto& t : terms) t.alpha *= scale;
    const MixtureSpec spec(terms, u(rng));
    const Vector x = random_vec(rng, n, 1.5);
    Vector sum_mix = Vector::Zero(n), sum_comix = x;
    for (const auto& t : spec.terms()) {
      const Vector lx = t.op.matrix() * x;
      const Vector p = prox(t.fn, spec.gamma(), lx);
      sum_mix += t.alpha * t.op.matrix().transpose() * p;
      sum_comix -= t.alpha * t.op.matrix().transpose() * (lx - p);
    }
    mix_gap = std::max({mix_gap, (mixture_prox(spec, x) - sum_mix).cwiseAbs().maxCoeff(),
                        (prox_composition(spec.embedded(), x) - sum_mix).cwiseAbs().maxCoeff(),
                        (comixture_prox(spec, x) - sum_comix).cwiseAbs().maxCoeff(),
                        (prox_cocomposition(spec.embedded(), x) - sum_comix).cwiseAbs().maxCoeff()});
  }
  o.check(mix_gap <= 1e-10, "mixture and comixture proxes, finite sums vs embedding on 100 specs: max gap " +
                                num(mix_gap) + " (tol 1e-10)");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const CompositionSpec spec(DenseMap::scalar(0.5), ConvexFunction::l1_norm(1), 1.0);
  // Independent grid oracles. Cocomposition: inf_v |Lx - v| + v^2 / (2 gamma (1 - L^2)).
  const double co_grid =
      scan_min([](double v) { return std::abs(0.5 - v) + v * v / (2 * 0.75); }, -3.0, 3.0, 1e-6).first;
  // Composition: the only feasible y with L* y = 0.5 is y = 1, value |y| + (y^2 - (L y)^2) / 2.
  const double comp_grid = scan_min(
                               [](double y) {
                                 if (std::abs(0.5 * y - 0.5) > 1e-12) return kInf;
                                 return std::abs(y) + (y * y - 0.25 * y * y) / 2;
                               },
                               -3.0, 3.0, 1e-6)
                               .first;
  o.check(std::abs(co_grid - 1.0 / 6.0) <= 1e-6, "grid oracle cocomposition(1) = " + num(co_grid, 12));
  o.check(std::abs(comp_grid - 1.375) <= 1e-6, "grid oracle composition(0.5) = " + num(comp_grid, 12));
  const double co = eval_cocomposition(spec, make_vector({1.0})).value.as_double();
  const double cp = eval_composition(spec, make_vector({0.5})).value.as_double();
  o.check(std::abs(co - 1.0 / 6.0) <= 1e-6, "cocomposition at 1: " + num(co, 12) + ", |err| " + num(std::abs(co - 1.0 / 6.0)) + " (tol 1e-6)");
  o.check(std::abs(cp - 1.375) <= 1e-6, "composition at 0.5: " + num(cp, 12) + ", |err| " + num(std::abs(cp - 1.375)) + " (tol 1e-6)");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const SuiteStats p20 = suite("prop20");
  label_line(o, p20, "cocomposition below the composition", 200);
  suite_line(o, "prop20", 800, p20);
  suite_line(o, "prop30-i", 1000, suite("prop30-i"));
  suite_line(o, "prop25", 100, suite("prop25"));
  return o;
}

Outcome criterion4() {
  Outcome o;
  suite_line(o, "thm45-i (sweep 2^-8..2^8, slack 1e-7)", 100, suite("thm45-i"));
  suite_line(o, "thm45-iv (gamma 2^-10)", 100, suite("thm45-iv"));
  suite_line(o, "thm45-vi (gamma 2^10, tol 1e-3)", 100, suite("thm45-vi"));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const char* id : {"prop1", "prop5", "prop10", "cor11", "prop13", "prop16", "cor19", "prop18"}) {
    suite_line(o, id, 100, suite(id));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const SuiteStats t65 = suite("thm65");
  label_line(o, t65, "mixture: direct sum against defining sum", 100);
  label_line(o, t65, "comixture: direct sum against defining sum", 100);

  const Vector p = enumerated_expectation_prox({0.5, 0.5}, {ConvexFunction::l1_norm(1), ConvexFunction::quadratic(1)},
                                               1.0, make_vector({2.0}));
  o.check(p[0] == 1.0, "proximal average prox at 2 = " + num(p[0]) + " (exact 1)");

  suite_line(o, "prop75", 100, suite("prop75"));
  suite_line(o, "prop79", 100, suite("prop79"));

  // Three shifted |. - w| with probabilities (0.2, 0.5, 0.3), n = 10^4.
  const std::vector<double> w{0.2, 0.5, 0.3};
  const std::vector<double> shift{-1.0, 0.5, 2.0};
  std::vector<ConvexFunction> fam;
  for (double s : shift) fam.push_back(ConvexFunction::l1_norm(1).translated(make_vector({s})));
  const double gamma = 0.8;
  const Vector x = make_vector({0.7});
  const Vector ref = enumerated_expectation_prox(w, fam, gamma, x);
  const FunctionSampler sampler = [&](std::mt19937_64& rng) {
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return r < w[0] ? fam[0] : (r < w[0] + w[1] ? fam[1] : fam[2]);
  };
  const SampledProx sp = sampled_expectation_prox(sampler, kSeed, 10000, gamma, x);
  const double dev = std::abs(sp.mean[0] - ref[0]);
  o.check(dev <= 3 * sp.std_error[0] + 1e-12,
          "sampled expectation prox: |mean - ref| " + num(dev) + " vs 3 SE " + num(3 * sp.std_error[0]));
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::vector<double> gammas;
  for (int k = 0; k <= 12; ++k) gammas.push_back(std::ldexp(1.0, -k));
  const ConvexFunction abs1 = ConvexFunction::l1_norm(1);
  struct Inst {
    DenseMap L;
    ConvexFunction g;
  };
  const std::vector<Inst> insts{
      {DenseMap::scalar(0.5), abs1.translated(make_vector({1.0}))},
      {DenseMap::from_rows({{0.6}, {0.6}}),
       ConvexFunction::separable_sum({atom::Block{0.5, abs1.translated(make_vector({1.0})), 0},
                                      atom::Block{0.5, abs1.translated(make_vector({-1.0})), 1}})},
      {DenseMap::scalar(0.8), abs1.plus_quadratic(1.0).plus_affine(make_vector({-2.0}), 2.0)},
  };
  int i = 0;
  for (const auto& in : insts) {
    const double ref = scan_min(
                           [&](double t) {
                             return eval(in.g, in.L.matrix() * make_vector({t})).as_double();
                           },
                           -20.0, 20.0, 1e-5)
                           .first;
    const ArgminSequenceReport seq = argmin_sequence(in.L, in.g, gammas);
    const double last = seq.rows.back().report.value.as_double();
    o.check(std::abs(last - ref) <= 1e-4, "instance " + std::to_string(++i) + ": inf at 2^-12 " + num(last) +
                                              " vs grid min " + num(ref) + " (tol 1e-4)");
  }
  return o;
}

Outcome criterion8(const std::string& exe, const std::filesystem::path& dir, double& slowest) {
  Outcome o;
  slowest = 0;
  for (const std::string preset : {"example1", "example2"}) {
    const auto out = dir / (preset + ".csv");
    const auto log = dir / (preset + ".log");
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = run_command("'" + exe + "' figure --preset " + preset + " --out '" + out.string() + "' 2> '" +
                               log.string() + "'");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0, above = 0, up = 0, bad_cols = 0;
    double origin_gl = NAN;
    std::vector<double> origin_co;
    while (std::getline(in, line)) {
      ++rows;
      std::vector<double> v;
      std::istringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) v.push_back(std::stod(c));
      if (v.size() != 6) {
        ++bad_cols;
        continue;
      }
      // gammas 0.5, 2, 8 in that order
      for (int k = 3; k < 6; ++k) above += v[k] > v[2] + 1e-6;
      up += v[4] > v[3] + 1e-6 || v[5] > v[4] + 1e-6;
      if (v[0] == 0.0 && v[1] == 0.0) {
        origin_gl = v[2];
        origin_co = {v[3], v[4], v[5]};
      }
    }
    const std::string logtext = slurp(log);
    o.check(rc == 0 && rows == 101 * 101 && bad_cols == 0 && secs < 60,
            preset + ": exit " + std::to_string(rc) + ", " + std::to_string(rows) + " rows x 3 gammas in " + num(secs) +
                " s (limit 60)");
    o.check(above == 0 && up == 0 && logtext.find("below_composition=OK") != std::string::npos &&
                logtext.find("monotone_in_gamma=OK") != std::string::npos,
            preset + ": cocomposition above g o L at " + std::to_string(above) + ", increasing in gamma at " +
                std::to_string(up) + " points");
    if (preset == "example1") {
      o.check(std::abs(origin_gl - std::sqrt(5.0)) <= 1e-6, "example1 g o L at the origin " + num(origin_gl, 12) +
                                                                 ", |err| " +
                                                                 num(std::abs(origin_gl - std::sqrt(5.0))) + " (tol 1e-6)");
    } else {
      bool zero = origin_gl == 0.0 && origin_co.size() == 3;
      for (double c : origin_co) zero = zero && std::abs(c) <= 1e-9;
      o.check(zero, "example2 at the origin: g o L and cocompositions vanish");
    }
  }
  return o;
}

Outcome criterion9(const std::string& exe, const std::filesystem::path& dir) {
  Outcome o;
  const auto out = dir / "verify_all.json";
  const auto log = dir / "verify_all.log";
  const int rc = run_command("'" + exe + "' verify all --out '" + out.string() + "' 2> '" + log.string() + "'");
  bool all_pass = false;
  std::size_t suites = 0;
  try {
    const auto j = nlohmann::json::parse(slurp(out));
    all_pass = j.at("all_pass").get<bool>();
    suites = j.at("suites").size();
  } catch (const std::exception&) {
  }
  o.check(rc == 0 && all_pass, "exit " + std::to_string(rc) + ", " + std::to_string(suites) + " suites, all_pass " +
                                   (all_pass ? "true" : "false"));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  const auto dir = std::filesystem::temp_directory_path() / ("proxkit_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> run;
  };
  double fig_slowest = 0;
  const std::vector<Criterion> criteria{
      {1, "exact identities", 30, criterion1},
      {2, "worked scalar values", 5, criterion2},
      {3, "inequality suites", 120, criterion3},
      {4, "asymptotics", 120, criterion4},
      {5, "calculus suites", 180, criterion5},
      {6, "mixtures and expectations", 60, criterion6},
      {7, "minimizer convergence", 30, criterion7},
      {8, "figure reproduction", 120, [&] { return criterion8(exe, dir, fig_slowest); }},
      {9, "verify all", 300, [&] { return criterion9(exe, dir); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    if ((c.id == 8 || c.id == 9) && exe.empty()) {
      o.check(false, "no executable given");
    } else {
      try {
        o = c.run();
      } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << num(secs)
              << " s, limit " << num(c.limit) << " s" << (in_time ? "" : " [TOO SLOW]") << '\n';
    for (const auto& n : o.notes) std::cout << "    " << n << '\n';
    std::cout.flush();
  }
  std::filesystem::remove_all(dir);
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << '\n';
  return failed == 0 ? 0 : 1;
}
