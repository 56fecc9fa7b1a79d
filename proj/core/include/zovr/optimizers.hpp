#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>

#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"
#include "zovr/trace.hpp"

namespace zovr {

struct HyperParams {
  double eta = 0.1;        // stepsize
  int q = 1;               // epoch length (iterations between anchor refreshes)
  int K = 100;             // iteration budget; loops run k = 0..K inclusive
  int s1 = 1;              // outer batch size, <= n
  int s2 = 1;              // inner batch size
  SmoothingParams smoothing;
  std::uint64_t seed = 0;
};

enum class Corollary { kCor1, kCor2, kCor3, kCor4, kTheorem2 };

/// Formulaic hyperparameter selection. The coordinate-only settings (kCor3,
/// kCor4, kTheorem2) leave beta unused; it is filled with delta so the bundle
/// stays valid. seed is left at 0 for the caller.
HyperParams select_params(Corollary which, std::int64_t n, int d,
                          std::int64_t K, double L);

/// Conventional O(1/d) baseline stepsize c / d.
double baseline_stepsize(int d, double c = 0.8);

struct Regularizer {
  enum class Kind { kZero, kL1 };
  Kind kind = Kind::kZero;
  double lambda = 0.0;

  static Regularizer zero() { return {}; }
  static Regularizer l1(double lambda) { return {Kind::kL1, lambda}; }

  double value(std::span<const double> x) const;
};

/// Closed-form proximal map of eta*lambda * h: soft thresholding for the l1
/// kind, identity for the zero kind.
Vec prox_map(std::span<const double> z, double eta_times_lambda,
             Regularizer::Kind kind);

/// Generalized projected gradient G(x, grad f(x), eta) = (x - x+) / eta with
/// x+ the proximal point at the exact gradient. Reporting oracle: spends no
/// queries according and requires an analytic gradient. For the zero
/// regularizer this is exactly grad f(x).
Vec generalized_gradient(const FiniteSumObjective& obj, std::span<const double> x,
                         double eta, const Regularizer& reg);

struct RunOptions {
  Vec x0;  // empty -> origin
  std::optional<std::int64_t> query_budget;  // stop before an iteration once reached
  int trace_stride = 1;          // record every stride-th iteration (first/last always)
  bool record_wall_time = false; // off by default so trace files stay reproducible
  bool capture_iterates = false; // diagnostic: store the whole trajectory
};

// All runners iterate k = 0..K, record rows after the iteration's estimate is
// built, and select the output index uniformly from {0..K} with the run's
// seeded generator. Identical (objective, params, options) give bit-identical
// traces. A non-finite evaluation or iterate aborts the run, keeping the rows
// collected so far and flagging the trace.

RunTrace run_zo_svrg_coord_rand(const FiniteSumObjective& obj,
                                const HyperParams& hp, const RunOptions& opts = {});

RunTrace run_zo_svrg_coord(const FiniteSumObjective& obj, const HyperParams& hp,
                           const RunOptions& opts = {});

RunTrace run_zo_spider_coord(const FiniteSumObjective& obj, const HyperParams& hp,
                             const RunOptions& opts = {});

/// Spider loop with the update replaced by a proximal gradient step on
/// f + h. Trace rows report ||G(x^k, grad f(x^k), eta)||^2.
RunTrace run_prox_zo_spider_coord(const FiniteSumObjective& obj,
                                  const Regularizer& reg, const HyperParams& hp,
                                  const RunOptions& opts = {});

// Convex variants: the epoch head restarts from a uniformly random iterate of
// the previous epoch and inner updates are single-sample (s2 is ignored).
RunTrace run_zo_svrg_coord_rand_c(const FiniteSumObjective& obj,
                                  const HyperParams& hp, const RunOptions& opts = {});

RunTrace run_zo_spider_coord_c(const FiniteSumObjective& obj,
                               const HyperParams& hp, const RunOptions& opts = {});

// Baselines: plain descent on (mini)batch two-point estimates with fresh
// directions per sample. zo_gd uses the full batch; zo_sgd draws s2 samples
// with replacement.
RunTrace run_zo_gd(const FiniteSumObjective& obj, const HyperParams& hp,
                   const RunOptions& opts = {});

RunTrace run_zo_sgd(const FiniteSumObjective& obj, const HyperParams& hp,
                    const RunOptions& opts = {});

RunTrace run_algorithm(const std::string& name, const FiniteSumObjective& obj,
                       const Regularizer& reg, const HyperParams& hp,
                       const RunOptions& opts = {});

// Deterministic sampling helpers shared with reference implementations. Every
// runner consumes its generator in the documented order: one output-index
// draw up front, then per-iteration batch draws (and sphere directions where
// the algorithm uses them).
int draw_output_index(std::mt19937_64& rng, int K);
std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n, int count);
std::vector<int> sample_with_replacement(std::mt19937_64& rng, int n, int count);

}  // namespace zovr
