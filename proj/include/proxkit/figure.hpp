#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "proxkit/proxcomp.hpp"

namespace proxkit {

// Endpoint-inclusive uniform grid on [lo, hi]^2.
struct FigureGrid {
  double lo = -4.0;
  double hi = 4.0;
  long points = 101;

  double coord(long i) const;
};

struct FigurePoint {
  double x1;
  double x2;
  double composed;  // g(Lx)
  // One entry per gamma, in the order given.
  std::vector<double> cocomposition;
  std::vector<double> error;
  std::vector<SolveStatus> status;
};

struct FigureData {
  FigureGrid grid;
  std::vector<double> gammas;
  // Row-major: x1 outer, x2 inner.
  std::vector<FigurePoint> points;
  std::size_t above_composition = 0;  // points with cocomposition > g(Lx) + slack
  std::size_t increasing_in_gamma = 0;  // points where a larger gamma gives a larger value
  std::size_t diverged = 0;

  bool below_composition() const { return above_composition == 0; }
  bool monotone_in_gamma() const { return increasing_in_gamma == 0; }
};

struct FigurePreset {
  std::string name;
  DenseMap op;
  ConvexFunction fn;
};

// "example1" or "example2"; ConfigError otherwise.
FigurePreset figure_preset(std::string_view name);
std::vector<std::string> figure_preset_names();

// Cocomposition of L with g at every grid point for each gamma. L must act on
// R^2 (UnsupportedDimension otherwise). Flags use slack 1e-6 plus the solver
// error of the values involved.
FigureData figure_data(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                       const FigureGrid& grid = {}, const SolverOpts& opts = {});
FigureData figure_data_serial(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                              const FigureGrid& grid = {}, const SolverOpts& opts = {});

}  // namespace proxkit
