#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "zovr/objectives.hpp"

namespace zovr {

struct SmoothingParams {
  double beta = 1e-2;   // radius of the two-point random estimator
  double delta = 1e-3;  // half-step of the coordinate estimator
};

/// A gradient estimate together with the exact number of component-function
/// evaluations spent building it. queries_used always equals the meter delta
/// observed around the call.
struct GradientEstimate {
  Vec vector;
  std::int64_t queries_used = 0;
};

/// Smallest smoothing step considered safe against cancellation at x:
/// 1e3 * machine epsilon * (1 + max_i |x_i|).
double smoothing_floor(std::span<const double> x);

/// Clamps a requested step up to the floor. Each activation is counted in a
/// process-wide tally so callers can surface a warning.
double clamp_smoothing(double step, std::span<const double> x);
std::int64_t smoothing_clamp_events();
void reset_smoothing_clamp_events();

/// Central-difference coordinate estimator over the sample mean
/// f_S = (1/|S|) sum_{i in S} f_i:
///   sum_j (f_S(x + delta e_j) - f_S(x - delta e_j)) / (2 delta) e_j.
/// Exactly 2 * d * |S| queries. Throws on delta <= 0 or an empty sample set.
GradientEstimate coord_estimate(const FiniteSumObjective& obj,
                                std::span<const int> samples,
                                std::span<const double> x, double delta);

/// Two-point random estimator d * (f_a(x + beta u) - f_a(x)) / beta * u for a
/// unit direction u. Exactly 2 queries. Throws on non-unit u or beta <= 0.
GradientEstimate rand_two_point_estimate(const FiniteSumObjective& obj,
                                         int sample_index,
                                         std::span<const double> x,
                                         std::span<const double> u, double beta);

/// Uniform direction on the unit sphere via a normalized Gaussian vector.
Vec sample_unit_sphere(std::mt19937_64& rng, int d);

/// Inner-loop estimator mixing per-sample two-point differences with a stored
/// coordinate anchor estimate:
///   v = (1/|B|) sum_j [rand(f_{a_j}, x_k; u_j) - rand(f_{a_j}, x_anchor; u_j)]
///       + anchor_grad,
/// reusing the same u_j at both points. Exactly 4 * |B| queries; each
/// f_{a_j}(x_k) and f_{a_j}(x_anchor) is evaluated once per j, never cached
/// across j. x_k == x_anchor cancels exactly to anchor_grad.
GradientEstimate svrg_rand_inner(const FiniteSumObjective& obj,
                                 std::span<const int> batch,
                                 const std::vector<Vec>& us,
                                 std::span<const double> x_k,
                                 std::span<const double> x_anchor,
                                 std::span<const double> anchor_grad,
                                 double beta);

/// Fully coordinate-wise inner-loop estimator:
///   v = coord(f_B, x_k) - coord(f_B, x_anchor) + anchor_grad.
/// Exactly 4 * d * |B| queries.
GradientEstimate svrg_coord_inner(const FiniteSumObjective& obj,
                                  std::span<const int> batch,
                                  std::span<const double> x_k,
                                  std::span<const double> x_anchor,
                                  std::span<const double> anchor_grad,
                                  double delta);

/// Recursive coordinate-wise estimator:
///   v = coord(f_B, x_k) - coord(f_B, x_prev) + v_prev.
/// Exactly 4 * d * |B| queries.
GradientEstimate spider_coord_step(const FiniteSumObjective& obj,
                                   std::span<const int> batch,
                                   std::span<const double> x_k,
                                   std::span<const double> x_prev,
                                   std::span<const double> v_prev, double delta);

}  // namespace zovr
