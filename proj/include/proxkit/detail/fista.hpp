#pragma once

#include <cmath>
#include <deque>

#include "proxkit/moreau.hpp"

namespace proxkit::detail {

struct FistaResult {
  Vector y;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIter;
  double residual = 0.0;
};

// Accelerated proximal gradient with gradient-based restart for min s + r.
//   grad(w)          -> gradient of s at w
//   prox(v, t)       -> prox of t*r at v
//   objective(y)     -> s(y) + r(y), used only once the iterate leaves the
//                       divergence radius
//   residual(w, v, y, t) -> stopping measure for the new iterate y = prox(v, t)
//                       with v = w - t*grad(w)
// momentum >= 0 selects a constant momentum (strongly convex case); a negative
// value selects the usual t_k sequence.
template <class Grad, class Prox, class Objective, class Residual>
FistaResult fista(Vector y0, double step, double momentum, Grad&& grad, Prox&& prox, Objective&& objective,
                  Residual&& residual, const SolverOpts& opts) {
  FistaResult out;
  Vector y = std::move(y0);
  Vector w = y;
  double theta = 1.0;
  std::deque<double> tail;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vector v = w - step * grad(w);
    Vector y_new = prox(v, step);
    out.iterations = it;
    if (!y_new.allFinite()) {
      out.status = SolveStatus::Diverged;
      out.y = std::move(y);
      return out;
    }
    out.residual = residual(w, v, y_new, step);
    if (out.residual <= opts.tol) {
      out.status = SolveStatus::Converged;
      out.y = std::move(y_new);
      return out;
    }

    const Vector dy = y_new - y;
    const bool restart = (w - y_new).dot(dy) > 0.0;
    double beta;
    if (restart) {
      theta = 1.0;
      beta = 0.0;
    } else if (momentum >= 0.0) {
      beta = momentum;
    } else {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      beta = (theta - 1.0) / theta_next;
      theta = theta_next;
    }
    w = y_new + beta * dy;
    y = std::move(y_new);

    if (y.norm() > opts.divergence_radius) {
      tail.push_back(objective(y));
      if (tail.size() > 101) tail.pop_front();
      if (tail.size() == 101 && tail.back() < tail.front()) {
        out.status = SolveStatus::Diverged;
        out.y = std::move(y);
        return out;
      }
    } else {
      tail.clear();
    }
  }
  out.status = SolveStatus::MaxIter;
  out.y = std::move(y);
  return out;
}

}  // namespace proxkit::detail
