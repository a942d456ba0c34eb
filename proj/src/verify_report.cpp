#include <cmath>
#include <cstdio>
#include <iomanip>
#include <locale>
#include <sstream>

#include "json.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/verify.hpp"

namespace proxkit::verify {

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::ordered_json as_json(const SuiteReport& r) {
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    nlohmann::ordered_json j;
    j["label"] = c.label;
    j["inputs_digest"] = c.inputs_digest;
    j["relation"] = to_string(c.relation);
    j["expected"] = number(c.expected);
    j["got"] = number(c.got);
    j["slack"] = number(c.slack);
    if (c.relation == Relation::Within) j["lower"] = number(c.lower);
    j["pass"] = c.pass;
    cases.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["suite_id"] = r.suite_id;
  j["seed"] = r.seed;
  j["scale"] = {{"dims", r.scale.dims}, {"n_points", r.scale.n_points}, {"grid_steps", r.scale.grid_steps}};
  j["n_cases"] = r.cases.size();
  j["failures"] = r.failures();
  j["all_pass"] = r.all_pass();
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["digest"] = r.digest();
  j["cases"] = std::move(cases);
  return j;
}

}  // namespace

Scale scale_preset(std::string_view name) {
  if (name == "small") return {2, 20, 501};
  if (name == "default") return {2, 100, 2001};
  if (name == "large") return {3, 400, 4001};
  throw ConfigError("unknown scale '" + std::string(name) + "' (expected small, default or large)");
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Equal:
      return "eq";
    case Relation::AtMost:
      return "le";
    case Relation::AtLeast:
      return "ge";
    case Relation::Within:
      return "within";
  }
  return "?";
}

bool SuiteReport::all_pass() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.pass ? 0 : 1;
  return n;
}

std::string SuiteReport::digest() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << suite_id << '|' << seed << '|' << scale.dims << '|' << scale.n_points << '|' << scale.grid_steps << '\n';
  for (const auto& c : cases) {
    os << c.label << '|' << c.inputs_digest << '|' << to_string(c.relation) << '|' << c.expected << '|' << c.got
       << '|' << c.slack << '|' << c.lower << '|' << c.pass << '\n';
  }
  return fnv1a_hex(os.str());
}

std::string to_json(const SuiteReport& r, int indent) { return as_json(r).dump(indent); }

std::string to_json(const std::vector<SuiteReport>& rs, int indent) {
  nlohmann::ordered_json j;
  std::size_t failures = 0;
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& r : rs) {
    failures += r.failures();
    suites.push_back(as_json(r));
  }
  j["all_pass"] = failures == 0;
  j["failures"] = failures;
  j["suites"] = std::move(suites);
  return j.dump(indent);
}

std::string summary_table(const std::vector<SuiteReport>& rs) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::left << std::setw(12) << "suite" << std::right << std::setw(8) << "cases" << std::setw(10) << "failures"
     << std::setw(11) << "seconds" << "  status\n";
  for (const auto& r : rs) {
    os << std::left << std::setw(12) << r.suite_id << std::right << std::setw(8) << r.cases.size() << std::setw(10)
       << r.failures() << std::setw(11) << std::fixed << std::setprecision(2) << r.elapsed_seconds << "  "
       << (r.all_pass() ? "ok" : "FAIL") << '\n';
  }
  return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace proxkit::verify
