#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "proxkit/grid.hpp"
#include "proxkit/proxcomp.hpp"

namespace proxkit {

struct MixtureTerm {
  double alpha;
  DenseMap op;
  ConvexFunction fn;
};

// Finite family (alpha_k, L_k, g_k) with 0 < sum alpha_k ||L_k||^2 <= 1.
class MixtureSpec {
 public:
  MixtureSpec(std::vector<MixtureTerm> terms, double gamma);

  const std::vector<MixtureTerm>& terms() const { return terms_; }
  double gamma() const { return gamma_; }
  Eigen::Index dim() const { return terms_.front().op.cols(); }
  Eigen::Index stacked_dim() const;
  // sum alpha_k ||L_k||^2 from certified norm bounds
  double budget() const;

  MixtureSpec with_gamma(double gamma) const;

  // (stacked_map, stacked_fun, gamma) of the embedding below.
  const CompositionSpec& embedded() const { return embedded_; }

  struct Cache;
  const Cache& cache() const { return *cache_; }

 private:
  MixtureSpec(std::vector<MixtureTerm> terms, double gamma, std::shared_ptr<const Cache> cache);
  std::vector<MixtureTerm> terms_;
  double gamma_;
  std::shared_ptr<const Cache> cache_;
  CompositionSpec embedded_;
};

// Weighted direct sum flattened by sqrt(alpha) scaling: block k of the map is
// sqrt(alpha_k) L_k and block k of the function is y -> alpha_k g_k(y / sqrt(alpha_k)).
// Its prox is sqrt(alpha_k) prox(g_k, gamma, y / sqrt(alpha_k)).
struct DirectSumEmbedding {
  DenseMap stacked_map;
  ConvexFunction stacked_fun;
};

DirectSumEmbedding embed(const MixtureSpec& spec);

struct MixtureEval {
  SolveReport direct_sum;    // proxcomp on the embedding
  SolveReport defining_sum;  // weighted formulas on the family itself
  double discrepancy;        // |direct - defining|, +inf unless both finite
};

MixtureEval mixture_eval(const MixtureSpec& spec, const Vector& x, const SolverOpts& opts = {});
MixtureEval comixture_eval(const MixtureSpec& spec, const Vector& x, const SolverOpts& opts = {});

// Conjugates, evaluated by the same weighted formulas with g_k replaced by
// g_k^* and gamma by 1/gamma.
SolveReport mixture_conjugate_eval(const MixtureSpec& spec, const Vector& u, const SolverOpts& opts = {});
SolveReport comixture_conjugate_eval(const MixtureSpec& spec, const Vector& u, const SolverOpts& opts = {});

Vector mixture_prox(const MixtureSpec& spec, const Vector& x);
Vector comixture_prox(const MixtureSpec& spec, const Vector& x);
double comixture_envelope(const MixtureSpec& spec, const Vector& x);
ExtReal comixture_recession(const MixtureSpec& spec, const Vector& x);

// Minimizer of x -> sum alpha_k envelope(g_k, gamma, L_k x).
SolveReport comixture_argmin(const MixtureSpec& spec, const SolverOpts& opts = {});
SolveReport comixture_argmin(const MixtureSpec& spec, const Vector& x0, const SolverOpts& opts);

struct ComixtureArgminSequence {
  std::vector<ArgminSequenceRow> rows;
  double reference;  // sum alpha_k g_k(L_k x_ref) at the gamma = 2^-20 minimizer
  bool nondecreasing;
};
ComixtureArgminSequence comixture_argmin_sequence(const MixtureSpec& spec, const std::vector<double>& gammas,
                                                  const SolverOpts& opts = {}, double slack = 1e-9);

struct PcmRow {
  double gamma;
  SolveReport mixture;
};
struct PcmReport {
  std::vector<PcmRow> tail;
  bool monotone;
  // inf { sum alpha_k g_k(y_k) : sum alpha_k L_k^* y_k = x } on a grid, stacked dim <= 2
  std::optional<GridResult> oracle;
  std::optional<double> gap;  // last tail value minus the oracle value
};
// gamma_tail strictly increasing.
PcmReport pcm_estimate(const MixtureSpec& spec, const Vector& x, const std::vector<double>& gamma_tail,
                       const SolverOpts& opts = {}, std::optional<GridSpec> oracle_grid = std::nullopt);

// Proximal average sum w_k f_k with prox only (all f_k at the same gamma),
// through h(z) = sum w_k (gamma ||z||^2 / 2 - envelope(f_k, gamma, gamma z)).
// Weights need not sum to one.
SolveReport proximal_average_eval(const std::vector<double>& weights, const std::vector<Proximable>& family,
                                  const Vector& x, const SolverOpts& opts = {});

struct SampledProx {
  Vector mean;
  Vector std_error;  // per coordinate
  long n_samples;
};

using FunctionSampler = std::function<ConvexFunction(std::mt19937_64&)>;

// Draw i uses its own generator seeded from (seed, i); proxes are evaluated in
// parallel and summed in index order.
SampledProx sampled_expectation_prox(const FunctionSampler& family, std::uint64_t seed, long n_samples, double gamma,
                                     const Vector& x);
Vector enumerated_expectation_prox(const std::vector<double>& weights, const std::vector<ConvexFunction>& family,
                                   double gamma, const Vector& x);

}  // namespace proxkit
