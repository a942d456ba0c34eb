#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "proxkit/linalg.hpp"

namespace proxkit {

// Uniform cell-centre grid on [lo, hi]^dim with `steps` cells per axis.
// zoom_levels > 0 re-grids around the incumbent (valid for convex objectives).
struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  long steps = 2001;
  int zoom_levels = 0;

  double step() const { return (hi - lo) / static_cast<double>(steps); }
};

enum class GridKind { Conjugate, Envelope, Prox, ConstrainedMin };

// Returns +inf outside the domain. Must be safe to call concurrently.
using Objective = std::function<double(const Vector&)>;

struct GridProblem {
  Objective f;
  Eigen::Index dim = 1;
  Vector point;  // x* for Conjugate, x for the others
  double gamma = 1.0;
  std::optional<DenseMap> op;  // ConstrainedMin: feasible set ||L* y - point|| <= constraint_tol
  double constraint_tol = 1e-3;
  std::optional<double> lipschitz;
};

struct GridResult {
  double value;
  Vector argmin;  // maximizer for Conjugate
  double step;
  std::optional<double> error_bound;
};

struct GridArgmin {
  double value;
  std::size_t index;
};

// Exhaustive minimum; ties go to the lowest linear index (axis 0 fastest).
GridArgmin grid_argmin(const Objective& obj, Eigen::Index dim, const GridSpec& grid);
GridArgmin grid_argmin_serial(const Objective& obj, Eigen::Index dim, const GridSpec& grid);
Vector grid_point(Eigen::Index dim, const GridSpec& grid, std::size_t index);

GridResult grid_oracle(GridKind kind, const GridProblem& problem, const GridSpec& grid);

}  // namespace proxkit
