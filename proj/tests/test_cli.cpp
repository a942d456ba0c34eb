#include <doctest.h>

#include <cmath>
#include <sstream>

#include "proxkit/cli.hpp"
#include "proxkit/examples.hpp"
#include "proxkit/figure.hpp"

using namespace proxkit;
using namespace proxkit::io;

namespace {

struct Run {
  int code;
  std::string out;
  std::string log;
};

Run run(const std::string& text) {
  const JobConfig job = job_from_text(text);
  std::ostringstream out, log;
  const int code = cli::run_job(job, out, log);
  return {code, out.str(), log.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

const std::string kHalfAbs =
    R"("spec": {"L": {"rows": 1, "cols": 1, "entries": [[0.5]]}, "g": {"atom": "l1", "params": {"dim": 1}}, "gamma": 1})";

}  // namespace

TEST_CASE("eval reproduces the scalar worked values") {
  Run r = run(R"({"command": "eval", "target": "cocomposition", )" + kHalfAbs + R"(, "points": [[1]]})");
  CHECK(r.code == cli::kExitOk);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"gamma", "x1", "value", "status", "residual"});
  CHECK(std::abs(std::stod(rows[1][2]) - 1.0 / 6.0) <= 1e-6);
  CHECK(r.out.find('\r') == std::string::npos);

  r = run(R"({"command": "eval", "target": "composition", )" + kHalfAbs + R"(, "points": [[0.5]]})");
  CHECK(r.code == cli::kExitOk);
  CHECK(std::abs(std::stod(csv(r.out)[1][2]) - 1.375) <= 1e-6);
}

TEST_CASE("prox and envelope commands") {
  Run r = run(R"({"command": "prox", "target": "composition", )" + kHalfAbs + R"(, "points": [[4], [2]]})");
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.5));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(0.0));
  r = run(R"({"command": "prox", "target": "cocomposition", )" + kHalfAbs + R"(, "points": [[2]]})");
  CHECK(std::stod(csv(r.out)[1][2]) == doctest::Approx(1.5));

  // Envelope at the spec gamma equals the envelope of g at Lx.
  r = run(R"({"command": "envelope", "target": "cocomposition", )" + kHalfAbs + R"(, "rho": 1, "points": [[4]]})");
  CHECK(std::stod(csv(r.out)[1][3]) == doctest::Approx(1.5));
  r = run(R"({"command": "envelope", "spec": {"atom": "l1", "params": {"dim": 1}}, "rho": 2, "points": [[3]]})");
  CHECK(std::stod(csv(r.out)[1][2]) == doctest::Approx(2.0));
}

TEST_CASE("sweep flags monotonicity") {
  Run r = run(R"({"command": "sweep", "spec": {"L": {"rows": 3, "cols": 2, "entries": [[0.7, 0.1], [-0.3, 0.4], [0.5, -0.3]]},
      "g": {"atom": "dist_ball", "params": {"center": [0, 0, 0], "radius": 2}}}, "points": [[3, -1]]})");
  CHECK(r.code == cli::kExitOk);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 18);  // header and 17 gammas 2^-8 .. 2^8
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][7] == "OK");
    CHECK(rows[i][8] == "OK");
  }
}

TEST_CASE("argmin sequence in JSON") {
  Run r = run(R"({"command": "argmin", "target": "comixture", "spec": {"terms": [
      {"alpha": 0.5, "L": {"rows": 1, "cols": 1, "entries": [[0.8]]}, "g": {"atom": "l1", "params": {"dim": 1}, "transforms": [{"type": "translate", "shift": [1]}]}},
      {"alpha": 0.5, "L": {"rows": 1, "cols": 1, "entries": [[0.6]]}, "g": {"atom": "l1", "params": {"dim": 1}, "transforms": [{"type": "translate", "shift": [-1]}]}}]},
      "gammas": [1, 0.25, 0.0625], "output": {"format": "json"}})");
  CHECK(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j["command"] == "argmin");
  CHECK(j["nondecreasing"] == true);
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0][0] == 1.0);
}

TEST_CASE("diverged solves exit with 3") {
  Run r = run(R"({"command": "eval", "target": "composition", "spec": {"L": {"rows": 2, "cols": 1, "entries": [[0.5], [0.5]]},
      "g": {"atom": "indicator_ball", "params": {"center": [0, 0], "radius": 0.1}}, "gamma": 1}, "points": [[1]]})");
  CHECK(r.code == cli::kExitDiverged);
  CHECK(csv(r.out)[1][2] == "inf");
}

TEST_CASE("verify command") {
  Run r = run(R"({"command": "verify", "suite": "prop17", "scale": "small", "output": {"format": "json"}})");
  CHECK(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["suites"][0]["suite_id"] == "prop17");
  CHECK(r.log.find("prop17") != std::string::npos);
}

TEST_CASE("figure grid is endpoint inclusive") {
  const FigureGrid g;
  CHECK(g.coord(0) == -4.0);
  CHECK(g.coord(50) == 0.0);
  CHECK(g.coord(100) == 4.0);
  CHECK(g.coord(25) == -2.0);
}

TEST_CASE("figure presets") {
  const FigureGrid small{-4.0, 4.0, 11};
  const std::vector<double> gammas{0.5, 2.0, 8.0};
  for (const auto& name : figure_preset_names()) {
    const FigurePreset p = figure_preset(name);
    const FigureData par = figure_data(p.op, p.fn, gammas, small);
    const FigureData ser = figure_data_serial(p.op, p.fn, gammas, small);
    REQUIRE(par.points.size() == 121);
    CHECK(par.below_composition());
    CHECK(par.monotone_in_gamma());
    CHECK(par.diverged == 0);
    for (std::size_t k = 0; k < par.points.size(); ++k) {
      CHECK(par.points[k].x1 == ser.points[k].x1);
      CHECK(par.points[k].x2 == ser.points[k].x2);
      CHECK(par.points[k].composed == ser.points[k].composed);
      CHECK(par.points[k].cocomposition == ser.points[k].cocomposition);
    }
    const FigurePoint& o = par.points[5 * 11 + 5];
    CHECK(o.x1 == 0.0);
    CHECK(o.x2 == 0.0);
    if (name == "example1") {
      CHECK(std::abs(o.composed - std::sqrt(5.0)) <= 1e-12);
    } else {
      CHECK(o.composed == 0.0);
      for (double v : o.cocomposition) CHECK(std::abs(v) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(figure_preset("example3"), ConfigError);
  CHECK_THROWS_AS(figure_data(DenseMap::from_rows({{0.5, 0.0, 0.1}}), ConvexFunction::l1_norm(1), gammas, small),
                  UnsupportedDimension);
}

TEST_CASE("figure command writes the grid in row-major order") {
  Run r = run(R"({"command": "figure", "preset": "example1", "gammas": [2, 0.5], "grid": {"lo": -1, "hi": 1, "points": 3}})");
  CHECK(r.code == cli::kExitOk);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "g_L", "cocomposition_gamma=2", "cocomposition_gamma=0.5"});
  CHECK(rows[1][0] == "-1");
  CHECK(rows[1][1] == "-1");
  CHECK(rows[2][1] == "0");
  CHECK(rows[5][0] == "0");
  CHECK(rows[5][2] == cli::format_double(std::sqrt(5.0)));
  CHECK(r.log.find("monotone_in_gamma=OK") != std::string::npos);
}
