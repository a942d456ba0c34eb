#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "proxkit/function.hpp"
#include "proxkit/moreau.hpp"

namespace proxkit {

namespace detail {
struct GramSpectrum;
}

inline constexpr double kAdmissibilityTol = 1e-9;

bool admissible(const DenseMap& L);

// (L, g, gamma) with 0 < ||L|| <= 1. Spectral data of L is computed once and
// shared between copies.
class CompositionSpec {
 public:
  CompositionSpec(DenseMap L, ConvexFunction g, double gamma);

  const DenseMap& op() const { return op_; }
  const ConvexFunction& fn() const { return fn_; }
  double gamma() const { return gamma_; }
  double op_norm() const;

  CompositionSpec with_gamma(double gamma) const;
  CompositionSpec with_fn(ConvexFunction g) const;

  struct Cache;
  const Cache& cache() const { return *cache_; }

 private:
  CompositionSpec(DenseMap L, ConvexFunction g, double gamma, std::shared_ptr<const Cache> cache);
  DenseMap op_;
  ConvexFunction fn_;
  double gamma_;
  std::shared_ptr<const Cache> cache_;
};

SolveReport eval_cocomposition(const CompositionSpec& spec, const Vector& x, const SolverOpts& opts = {});
SolveReport eval_composition(const CompositionSpec& spec, const Vector& x, const SolverOpts& opts = {});
Vector prox_composition(const CompositionSpec& spec, const Vector& x);
Vector prox_cocomposition(const CompositionSpec& spec, const Vector& x);
double envelope_cocomposition(const CompositionSpec& spec, double rho, const Vector& x, const SolverOpts& opts = {});

struct SubgradientWitness {
  Vector point;
  Vector subgradient;
};
SubgradientWitness subgradient_witness_cocomposition(const CompositionSpec& spec, const Vector& x);

ExtReal recession_cocomposition(const CompositionSpec& spec, const Vector& x);
ExtReal perspective_cocomposition(const CompositionSpec& spec, const Vector& x, double xi,
                                  const SolverOpts& opts = {});

struct SweepRow {
  double gamma;
  SolveReport composition;
  SolveReport cocomposition;
};
struct SweepReport {
  std::vector<SweepRow> rows;
  bool composition_monotone;
  bool cocomposition_monotone;
};
// gammas strictly increasing; rows are evaluated in parallel.
SweepReport gamma_sweep(const DenseMap& L, const ConvexFunction& g, const Vector& x, const std::vector<double>& gammas,
                        const SolverOpts& opts = {}, double slack = 1e-7);

struct SmallGammaRow {
  double gamma;
  double value;  // cocomposition
  double gap;    // g(Lx) - value
  std::optional<double> bound;  // gamma * beta^2 / 2
  bool within;
};
struct SmallGammaReport {
  double target;  // g(Lx)
  std::vector<SmallGammaRow> rows;
  bool all_within;
};
SmallGammaReport limit_small_gamma(const DenseMap& L, const ConvexFunction& g, const Vector& x,
                                   const std::vector<double>& gammas, const SolverOpts& opts = {},
                                   double tol = 1e-6);

enum class LargeGammaCase { NormBelowOne, NormOne };

struct LargeGammaReport {
  SweepReport sweep;
  // inf { g(y) : L* y = x }, +inf when the fibre is empty
  double composition_target;
  // inf g when ||L|| < 1, otherwise inf over Lx - ran(Id - L L*)
  double cocomposition_target;
  LargeGammaCase which;
  double composition_tail_gap;
  double cocomposition_tail_gap;
};
LargeGammaReport limit_large_gamma(const DenseMap& L, const ConvexFunction& g, const Vector& x,
                                   const std::vector<double>& gammas, const SolverOpts& opts = {});

// inf { g(y) : L* y = x } by splitting over the fibre.
double infimal_postcomposition(const DenseMap& L, const ConvexFunction& g, const Vector& x,
                               const SolverOpts& opts = {});

// Minimizer of x -> envelope(g, gamma, Lx); value is that envelope at the
// minimizer, which equals the infimum of the cocomposition.
SolveReport argmin_cocomposition(const CompositionSpec& spec, const SolverOpts& opts = {});
SolveReport argmin_cocomposition(const CompositionSpec& spec, const Vector& x0, const SolverOpts& opts);

struct ArgminSequenceRow {
  double gamma;
  SolveReport report;
};
struct ArgminSequenceReport {
  std::vector<ArgminSequenceRow> rows;  // gammas in the given (decreasing) order, warm-started
  double reference;  // g(L x_ref) at the gamma = 2^-20 minimizer
  bool nondecreasing;
};
ArgminSequenceReport argmin_sequence(const DenseMap& L, const ConvexFunction& g, const std::vector<double>& gammas,
                                     const SolverOpts& opts = {}, double slack = 1e-9);

// Function known only through its values and the prox of gamma * f at one
// fixed gamma (for instance an inner cocomposition).
struct Proximable {
  Eigen::Index dim;
  double gamma;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> prox;
};

Proximable proximable(const ConvexFunction& g, double gamma);
// L cocomposed with g: values by eval_cocomposition, prox by the closed formula.
Proximable proximable_cocomposition(const CompositionSpec& spec, const SolverOpts& opts = {});

// Cocomposition of S with f (parameter f.gamma) through the primal form
// inf_z f(z) + <Sx - z, M^{-1}(Sx - z)>/2, M = gamma (Id - S S*), by
// Douglas-Rachford splitting. Requires ||S|| < 1.
SolveReport eval_cocomposition_splitting(const DenseMap& S, const Proximable& f, const Vector& x,
                                         const SolverOpts& opts = {});

}  // namespace proxkit
