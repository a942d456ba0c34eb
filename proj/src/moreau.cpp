#include "proxkit/moreau.hpp"

#include <cmath>
#include <deque>

namespace proxkit {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::Diverged:
      return "diverged";
    case SolveStatus::MaxIter:
      return "max_iter";
  }
  return "unknown";
}

double envelope(const ConvexFunction& f, double gamma, const Vector& x) {
  const Vector p = prox(f, gamma, x);
  const ExtReal fp = eval(f, p);
  if (fp.is_infinite()) throw ParameterError("envelope: prox left the domain");
  return fp.value() + (x - p).squaredNorm() / (2.0 * gamma);
}

Vector envelope_gradient(const ConvexFunction& f, double gamma, const Vector& x) {
  return (x - prox(f, gamma, x)) / gamma;
}

SolveReport conjugate_numeric(const ConvexFunction& f, const Vector& xstar, const SolverOpts& opts) {
  require_dim(xstar, f.dim(), "conjugate_numeric");
  const double t = 1.0;
  auto objective = [&](const Vector& x) { return x.dot(xstar) - eval(f, x).as_double(); };

  Vector x = prox(f, t, Vector::Zero(f.dim()));
  std::deque<double> history;
  SolveReport rep;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Vector next = prox(f, t, x + t * xstar);
    const Vector step = next - x;
    const double move = step.norm();
    x = std::move(next);
    rep.iterations = it;
    rep.residual = move / t;
    if (rep.residual <= opts.tol) {
      rep.status = SolveStatus::Converged;
      rep.value = ExtReal::from_double(objective(x));
      rep.argpoint = x;
      return rep;
    }
    const double obj = objective(x);
    history.push_back(obj);
    if (history.size() > 101) history.pop_front();
    // Ray certificate: along the current step direction d the objective grows
    // at rate <d, x*> - rec f(d) > 0, so the supremum is +inf.
    if (it % 10 == 0 && move > 0) {
      const Vector d = step / move;
      const double slope = d.dot(xstar) - recession_eval(f, d).as_double();
      if (slope > std::sqrt(opts.tol)) {
        rep.status = SolveStatus::Diverged;
        rep.value = ExtReal::plus_infinity();
        return rep;
      }
    }
    if (x.norm() > opts.divergence_radius && history.size() == 101 && history.back() > history.front()) {
      rep.status = SolveStatus::Diverged;
      rep.value = ExtReal::plus_infinity();
      return rep;
    }
  }
  rep.status = SolveStatus::MaxIter;
  rep.value = ExtReal::from_double(objective(x));
  rep.argpoint = x;
  return rep;
}

}  // namespace proxkit
