#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"

namespace zovr {

/// Inputs for the variance-bound formulas. The indicator I(s1 < n) is derived
/// from s1 and n, never stored.
struct BoundInputs {
  double L = 1.0;
  double sigma2 = 0.0;
  int d = 1;
  std::int64_t n = 1;
  std::int64_t s1 = 1;
  std::int64_t s2 = 1;
  std::int64_t q = 1;
  std::int64_t K = 1;
  double eta = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double dist_sq = 0.0;  // ||x^k - x^anchor||^2
};

/// Variance bound for the mixed two-point/coordinate inner estimator against
/// the smoothed gradient:
///   6 d L^2 dist^2 / s2 + 3 L^2 b^2 d^2 / s2
///   + 18 I(s1<n)/s1 (2 L^2 d dl^2 + sigma^2) + 6 L^2 d dl^2 + 3 b^2 L^2 d^2 / 2.
double lemma1_bound(const BoundInputs& in);

/// Variance bound for the fully coordinate-wise inner estimator against the
/// full coordinate estimate:
///   12 L^2 d dl^2 / s2 + 6 L^2 dist^2 / s2 + 6 I(s1<n)/s1 (2 L^2 d dl^2 + sigma^2).
double lemma2_bound(const BoundInputs& in);

/// Variance bound for the recursive coordinate estimator k - anchor steps
/// after the refresh, given the accumulated sum of ||v^t||^2:
///   3 eta^2 L^2 / s2 * sum_v_sq + (k - anchor) 6 L^2 d dl^2 / s2
///   + 3 I(s1<n)/s1 (2 L^2 d dl^2 + sigma^2).
double lemma3_bound(const BoundInputs& in, double sum_v_sq, int k_minus_anchor);

/// Deviation of the ball-smoothed surrogate from f:
/// (value gap beta^2 L / 2, gradient gap beta L d / 2).
std::pair<double, double> smoothing_gaps(double L, int d, double beta);

/// Analysis constants of the mixed-estimator convergence bound; reported for
/// diagnostics only, no tightness is asserted. g = 0 selects the mini-batch
/// default 4000 d eta^2 L^3 q / s2.
struct Theorem1Constants {
  double g, c, lambda, rho, chi, tau;
};
Theorem1Constants theorem1_constants(const BoundInputs& in, double g = 0.0);

/// Analysis constants of the recursive-estimator convergence bound.
struct Theorem3Constants {
  double phi, theta;
};
Theorem3Constants theorem3_constants(const BoundInputs& in);

/// sigma^2 for a test objective: max over the probe points of
/// (1/n) sum_i ||grad f_i(x) - grad f(x)||^2, computed with the exact
/// gradient oracle.
double empirical_sigma2(const FiniteSumObjective& obj,
                        std::span<const Vec> probes);

struct MonteCarloStat {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t draws = 0;
};

/// Smoothed gradient oracle grad f_beta(x) = E_{u ~ ball} grad f(x + beta u),
/// estimated with `draws` samples split over fixed shards (deterministic for
/// a given seed regardless of threading).
Vec smoothed_gradient_ball_mc(const FiniteSumObjective& obj,
                              std::span<const double> x, double beta,
                              std::int64_t draws, std::uint64_t seed);

/// Monte-Carlo estimate of E || f_beta(x) - f(x) | via ball sampling; returns
/// the signed mean of f(x + beta u) - f(x).
MonteCarloStat smoothed_value_gap_mc(const FiniteSumObjective& obj,
                                     std::span<const double> x, double beta,
                                     std::int64_t draws, std::uint64_t seed);

/// E ||v - grad f_beta(x_k)||^2 over batch and direction draws for the mixed
/// inner estimator. s1 < n additionally resamples the anchor batch each draw.
MonteCarloStat mc_svrg_rand_variance(const FiniteSumObjective& obj,
                                     std::span<const double> x_k,
                                     std::span<const double> x_anchor,
                                     std::span<const double> grad_beta_x_k,
                                     int s1, int s2, double beta, double delta,
                                     std::int64_t draws, std::uint64_t seed);

/// E ||v - coord(f, x_k)||^2 over batch draws for the coordinate inner
/// estimator.
MonteCarloStat mc_svrg_coord_variance(const FiniteSumObjective& obj,
                                      std::span<const double> x_k,
                                      std::span<const double> x_anchor,
                                      int s1, int s2, double delta,
                                      std::int64_t draws, std::uint64_t seed);

/// Distribution of the recursive estimator after `steps` inner updates from a
/// fixed anchor point: err tracks ||v^k - coord(f, x^k)||^2 and sum_v_sq the
/// companion sum_{t<k} ||v^t||^2 appearing in the bound.
struct SpiderMcResult {
  MonteCarloStat err;
  MonteCarloStat sum_v_sq;
};
SpiderMcResult mc_spider_variance(const FiniteSumObjective& obj,
                                  std::span<const double> x_anchor, int s1,
                                  int s2, int steps, double eta, double delta,
                                  std::int64_t draws, std::uint64_t seed);

}  // namespace zovr
