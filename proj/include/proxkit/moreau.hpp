#pragma once

#include <optional>
#include <string>

#include "proxkit/function.hpp"

namespace proxkit {

struct SolverOpts {
  double tol = 1e-8;
  int max_iter = 100000;
  double divergence_radius = 1e6;
};

enum class SolveStatus { Converged, Diverged, MaxIter };

std::string to_string(SolveStatus s);

struct SolveReport {
  ExtReal value;
  std::optional<Vector> argpoint;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIter;
  double residual = 0.0;
};

// f(p) + ||x - p||^2 / (2 gamma) with p = prox(f, gamma, x)
double envelope(const ConvexFunction& f, double gamma, const Vector& x);
// (x - prox(f, gamma, x)) / gamma
Vector envelope_gradient(const ConvexFunction& f, double gamma, const Vector& x);

// sup_x <x, xstar> - f(x) by proximal-point iteration with unit step.
SolveReport conjugate_numeric(const ConvexFunction& f, const Vector& xstar, const SolverOpts& opts = {});

}  // namespace proxkit
