#include "proxkit/grid.hpp"

#include <cmath>
#include <limits>

namespace proxkit {

namespace {

constexpr long kMaxSteps2d = 2001;
constexpr long kMaxPoints = kMaxSteps2d * kMaxSteps2d;

std::size_t total_points(Eigen::Index dim, const GridSpec& grid) {
  if (dim < 1 || dim > 2) throw UnsupportedDimension("grid oracle supports dimension 1 or 2");
  if (grid.steps < 1) throw ParameterError("grid: steps must be positive");
  if (!(grid.hi > grid.lo)) throw ParameterError("grid: hi must exceed lo");
  if (dim == 2 && grid.steps > kMaxSteps2d) throw ParameterError("grid: at most 2001 steps per axis in 2-D");
  if (dim == 1 && grid.steps > kMaxPoints) throw ParameterError("grid: too many points");
  return dim == 1 ? static_cast<std::size_t>(grid.steps)
                  : static_cast<std::size_t>(grid.steps) * static_cast<std::size_t>(grid.steps);
}

bool better(double v, std::size_t i, double bv, std::size_t bi) {
  if (v < bv) return true;
  return v == bv && i < bi;
}

}  // namespace

Vector grid_point(Eigen::Index dim, const GridSpec& grid, std::size_t index) {
  const double h = grid.step();
  Vector p(dim);
  const auto n = static_cast<std::size_t>(grid.steps);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const std::size_t k = index % n;
    index /= n;
    p[a] = grid.lo + (static_cast<double>(k) + 0.5) * h;
  }
  return p;
}

GridArgmin grid_argmin_serial(const Objective& obj, Eigen::Index dim, const GridSpec& grid) {
  const std::size_t n = total_points(dim, grid);
  GridArgmin best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = obj(grid_point(dim, grid, i));
    if (std::isnan(v)) continue;
    if (better(v, i, best.value, best.index)) best = {v, i};
  }
  return best;
}

GridArgmin grid_argmin(const Objective& obj, Eigen::Index dim, const GridSpec& grid) {
  const std::size_t n = total_points(dim, grid);
  GridArgmin best{std::numeric_limits<double>::infinity(), 0};
#pragma omp parallel
  {
    GridArgmin local{std::numeric_limits<double>::infinity(), 0};
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const double v = obj(grid_point(dim, grid, i));
      if (std::isnan(v)) continue;
      if (better(v, i, local.value, local.index)) local = {v, i};
    }
#pragma omp critical(proxkit_grid_argmin)
    {
      if (better(local.value, local.index, best.value, best.index)) best = local;
    }
  }
  return best;
}

GridResult grid_oracle(GridKind kind, const GridProblem& problem, const GridSpec& grid) {
  const Eigen::Index dim = problem.dim;
  total_points(dim, grid);
  if (!problem.f) throw ParameterError("grid_oracle: missing objective");

  Objective obj;
  switch (kind) {
    case GridKind::Conjugate:
      require_dim(problem.point, dim, "grid_oracle");
      obj = [&](const Vector& y) { return problem.f(y) - y.dot(problem.point); };
      break;
    case GridKind::Envelope:
    case GridKind::Prox:
      require_dim(problem.point, dim, "grid_oracle");
      if (!(problem.gamma > 0)) throw ParameterError("grid_oracle: gamma must be positive");
      obj = [&](const Vector& y) {
        return problem.f(y) + (problem.point - y).squaredNorm() / (2.0 * problem.gamma);
      };
      break;
    case GridKind::ConstrainedMin:
      if (!problem.op) throw ParameterError("grid_oracle: ConstrainedMin needs an operator");
      if (problem.op->rows() != dim) throw DimensionError("grid_oracle: operator codomain mismatch");
      require_dim(problem.point, problem.op->cols(), "grid_oracle");
      obj = [&](const Vector& y) {
        const Vector r = problem.op->matrix().transpose() * y - problem.point;
        if (r.norm() > problem.constraint_tol) return std::numeric_limits<double>::infinity();
        return problem.f(y);
      };
      break;
  }

  GridSpec g = grid;
  GridArgmin best = grid_argmin(obj, dim, g);
  Vector arg = grid_point(dim, g, best.index);
  for (int level = 0; level < grid.zoom_levels && std::isfinite(best.value); ++level) {
    const double h = g.step();
    GridSpec z = g;
    // Re-grid a window of four cells per axis around the incumbent.
    const Vector centre = arg;
    const double half = 2.0 * h;
    z.lo = -half;
    z.hi = half;
    auto shifted = [&](const Vector& d) { return obj(centre + d); };
    GridArgmin zb = grid_argmin(shifted, dim, z);
    if (zb.value <= best.value) {
      best = zb;
      arg = centre + grid_point(dim, z, zb.index);
    }
    g = z;
  }

  GridResult res;
  res.step = g.step();
  res.argmin = arg;
  res.value = kind == GridKind::Conjugate ? -best.value : best.value;
  if (problem.lipschitz) res.error_bound = *problem.lipschitz * res.step * std::sqrt(static_cast<double>(dim));
  return res;
}

}  // namespace proxkit
