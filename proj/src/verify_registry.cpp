#include <algorithm>
#include <chrono>
#include <map>

#include "proxkit/errors.hpp"
#include "proxkit/verify.hpp"
#include "verify/suites.hpp"

namespace proxkit::verify {

namespace {

struct Entry {
  SuiteInfo info;
  suites::SuiteFn fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {{"lemmas", "conjugate and envelope calculus of the atoms", {"lemma2", "lemma3", "lemma8", "lemma10"}},
       suites::lemmas},
      {{"prop1", "scaling rules", {"prop1"}}, suites::prop1},
      {{"prop4", "fibre and dual formulas", {"def1", "prop4"}}, suites::prop4},
      {{"prop5", "quadratic, linear and translation perturbations", {"prop5"}}, suites::prop5},
      {{"prop6", "shifted convexity of the composition", {"prop6"}}, suites::prop6},
      {{"prop7", "convexity and conjugate pairs", {"prop7"}}, suites::prop7},
      {{"prop9", "subgradient witnesses", {"prop9"}}, suites::prop9},
      {{"prop10", "envelopes of the cocomposition", {"prop10"}}, suites::prop10},
      {{"cor11", "splitting through a square operator", {"cor11"}}, suites::cor11},
      {{"prop13", "recession function", {"prop13"}}, suites::prop13},
      {{"prop16", "perspective", {"prop16"}}, suites::prop16},
      {{"prop17", "prox of the cocomposition", {"prop17"}}, suites::prop17},
      {{"prop18", "gradient Lipschitz constant", {"prop18"}}, suites::prop18},
      {{"cor19", "Lipschitz transfer", {"cor19"}}, suites::cor19},
      {{"prop20", "ordering of the envelopes", {"prop20"}}, suites::prop20},
      {{"prop25", "projector family", {"prop25"}}, suites::prop25},
      {{"prop30-i", "gap to the composition", {"prop30"}}, suites::prop30_i},
      {{"ex-proj", "projection example", {"ex-proj"}}, suites::ex_proj},
      {{"ex-comp", "plain composition as a cocomposition", {"ex-comp"}}, suites::ex_comp},
      {{"ex-yama", "isometries and coisometries", {"ex-yama"}}, suites::ex_yama},
      {{"thm45-i", "monotonicity in gamma", {"thm45"}}, suites::thm45_i},
      {{"thm45-iv", "small-gamma limit", {"thm45"}}, suites::thm45_iv},
      {{"thm45-vi", "large-gamma limits", {"thm45"}}, suites::thm45_vi},
      {{"cor46", "limits for isometries", {"cor46"}}, suites::cor46},
      {{"prop55", "convergence of the infima", {"prop55", "cor-argmin"}}, suites::prop55},
      {{"thm65", "mixture calculus", {"prop60", "thm65", "ex12"}}, suites::thm65},
      {{"thm70", "mixture ordering and limits", {"thm70", "ex13"}}, suites::thm70},
      {{"prop75", "proximal average of cocompositions", {"prop75"}}, suites::prop75},
      {{"prop79", "proximal average as a mixture", {"prop79", "remark-r80", "sampled-pex"}}, suites::prop79},
      {{"prop80", "proximal average bounds and limits", {"prop80"}}, suites::prop80},
  };
  return e;
}

}  // namespace

const std::vector<SuiteInfo>& registry() {
  static const std::vector<SuiteInfo> r = [] {
    std::vector<SuiteInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return r;
}

SuiteReport run_suite(const std::string& suite_id, std::uint64_t seed, const Scale& scale) {
  const auto& e = entries();
  const auto it = std::find_if(e.begin(), e.end(), [&](const Entry& x) { return x.info.id == suite_id; });
  if (it == e.end()) throw RegistryError("unknown suite: " + suite_id);
  SuiteReport r;
  r.suite_id = suite_id;
  r.seed = seed;
  r.scale = scale;
  const auto t0 = std::chrono::steady_clock::now();
  r.cases = it->fn(seed, scale);
  r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<SuiteReport> run_all(std::uint64_t seed, const Scale& scale) {
  std::vector<SuiteReport> out;
  for (const auto& e : entries()) out.push_back(run_suite(e.info.id, seed, scale));
  return out;
}

std::vector<std::string> uncovered(const std::vector<std::string>& manifest) {
  std::vector<std::string> missing;
  for (const auto& item : manifest) {
    bool found = false;
    for (const auto& e : entries())
      found = found || std::find(e.info.covers.begin(), e.info.covers.end(), item) != e.info.covers.end();
    if (!found) missing.push_back(item);
  }
  return missing;
}

}  // namespace proxkit::verify
