#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proxkit::verify {

// Desk scale of a suite run: largest random dimension, base number of
// random instances and grid steps per axis for 1-D oracles.
struct Scale {
  int dims = 2;
  int n_points = 100;
  long grid_steps = 2001;
};

// "small", "default" or "large"; ConfigError otherwise.
Scale scale_preset(std::string_view name);

enum class Relation { Equal, AtMost, AtLeast, Within };
std::string to_string(Relation r);

// Eq: |got - expected| <= slack; AtMost: got <= expected + slack;
// AtLeast: got >= expected - slack; Within: lower - slack <= got <= expected + slack.
// +inf on the permissive side always passes; NaN never does.
struct Case {
  std::string label;
  std::string inputs_digest;
  Relation relation = Relation::Equal;
  double expected = 0.0;
  double got = 0.0;
  double slack = 0.0;
  double lower = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite_id;
  std::vector<Case> cases;
  std::uint64_t seed = 0;
  Scale scale;
  double elapsed_seconds = 0.0;

  bool all_pass() const;
  std::size_t failures() const;
  // FNV-1a over the serialized cases; independent of timing and thread count.
  std::string digest() const;
};

std::string to_json(const SuiteReport& r, int indent = 2);
std::string to_json(const std::vector<SuiteReport>& rs, int indent = 2);
std::string summary_table(const std::vector<SuiteReport>& rs);

struct SuiteInfo {
  std::string id;
  std::string title;
  std::vector<std::string> covers;
};

const std::vector<SuiteInfo>& registry();
SuiteReport run_suite(const std::string& suite_id, std::uint64_t seed, const Scale& scale = {});
// Every registered suite, in registry order.
std::vector<SuiteReport> run_all(std::uint64_t seed, const Scale& scale = {});

// Items of the result manifest with no registered suite.
std::vector<std::string> uncovered(const std::vector<std::string>& manifest);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace proxkit::verify
