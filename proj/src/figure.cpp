#include "proxkit/figure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proxkit/detail/parallel.hpp"
#include "proxkit/examples.hpp"

namespace proxkit {

namespace {

constexpr double kFlagSlack = 1e-6;

double report_error(const SolveReport& r) {
  if (r.value.is_infinite()) return 0.0;
  return r.residual * std::max(1.0, std::abs(r.value.value()));
}

template <class For>
FigureData build(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                 const FigureGrid& grid, const SolverOpts& opts, For&& run) {
  if (L.cols() != 2) throw UnsupportedDimension("figure: operator must act on R^2");
  if (grid.points < 2 || !(grid.lo < grid.hi)) throw ParameterError("figure: grid needs lo < hi and >= 2 points");
  if (gammas.empty()) throw ParameterError("figure: empty gamma list");
  std::vector<CompositionSpec> specs;
  specs.reserve(gammas.size());
  for (double gm : gammas) specs.emplace_back(L, g, gm);

  FigureData d;
  d.grid = grid;
  d.gammas = gammas;
  const auto n = static_cast<std::size_t>(grid.points);
  d.points.resize(n * n);
  run(n * n, [&](std::size_t k) {
    FigurePoint& p = d.points[k];
    p.x1 = grid.coord(static_cast<long>(k / n));
    p.x2 = grid.coord(static_cast<long>(k % n));
    Vector x(2);
    x << p.x1, p.x2;
    p.composed = eval(g, L.matrix() * x).as_double();
    for (const auto& spec : specs) {
      SolveReport r = eval_cocomposition(spec, x, opts);
      p.cocomposition.push_back(r.value.as_double());
      p.error.push_back(report_error(r));
      p.status.push_back(r.status);
    }
  });

  std::vector<std::size_t> order(gammas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gammas[a] < gammas[b]; });
  for (const auto& p : d.points) {
    bool above = false;
    bool up = false;
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      if (p.status[j] == SolveStatus::Diverged) ++d.diverged;
      if (p.cocomposition[j] > p.composed + kFlagSlack + p.error[j]) above = true;
    }
    for (std::size_t j = 1; j < order.size(); ++j) {
      std::size_t a = order[j - 1], b = order[j];
      if (p.cocomposition[b] > p.cocomposition[a] + kFlagSlack + p.error[a] + p.error[b]) up = true;
    }
    d.above_composition += above;
    d.increasing_in_gamma += up;
  }
  return d;
}

}  // namespace

double FigureGrid::coord(long i) const {
  if (i == points - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

FigurePreset figure_preset(std::string_view name) {
  if (name == "example1") return {"example1", examples::example1_operator(), examples::example1_function()};
  if (name == "example2") return {"example2", examples::example2_operator(), examples::example2_function()};
  throw ConfigError("unknown figure preset: " + std::string(name));
}

std::vector<std::string> figure_preset_names() { return {"example1", "example2"}; }

FigureData figure_data(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                       const FigureGrid& grid, const SolverOpts& opts) {
  return build(L, g, gammas, grid, opts, [](std::size_t n, auto&& body) { detail::parallel_for(n, body); });
}

FigureData figure_data_serial(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                              const FigureGrid& grid, const SolverOpts& opts) {
  return build(L, g, gammas, grid, opts, [](std::size_t n, auto&& body) { detail::serial_for(n, body); });
}

}  // namespace proxkit
