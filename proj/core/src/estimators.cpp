#include "zovr/estimators.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zovr {

namespace {

std::atomic<std::int64_t> g_clamp_events{0};

void check_sample_range(const FiniteSumObjective& obj, std::span<const int> samples) {
  const int n = obj.num_components();
  for (int i : samples) {
    if (i < 0 || i >= n) throw std::out_of_range("sample index out of range");
  }
}

}  // namespace

double smoothing_floor(std::span<const double> x) {
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::fabs(v));
  return 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + max_abs);
}

double clamp_smoothing(double step, std::span<const double> x) {
  const double floor = smoothing_floor(x);
  if (step < floor) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return floor;
  }
  return step;
}

std::int64_t smoothing_clamp_events() {
  return g_clamp_events.load(std::memory_order_relaxed);
}

void reset_smoothing_clamp_events() {
  g_clamp_events.store(0, std::memory_order_relaxed);
}

GradientEstimate coord_estimate(const FiniteSumObjective& obj,
                                std::span<const int> samples,
                                std::span<const double> x, double delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  if (samples.empty()) throw std::invalid_argument("empty sample set");
  check_sample_range(obj, samples);

  const int d = obj.dim();
  delta = clamp_smoothing(delta, x);
  const double inv = 1.0 / (2.0 * delta * static_cast<double>(samples.size()));

  GradientEstimate est;
  est.vector.assign(d, 0.0);
  Vec shifted(x.begin(), x.end());
  // Coordinate loop outside, sample loop inside: the summation order is fixed
  // so repeated calls are bit-identical.
  for (int j = 0; j < d; ++j) {
    const double saved = shifted[j];
    double diff = 0.0;
    shifted[j] = saved + delta;
    for (int i : samples) diff += obj.eval_component(i, shifted);
    shifted[j] = saved - delta;
    for (int i : samples) diff -= obj.eval_component(i, shifted);
    shifted[j] = saved;
    est.vector[j] = diff * inv;
  }
  est.queries_used = 2 * static_cast<std::int64_t>(d) *
                     static_cast<std::int64_t>(samples.size());
  return est;
}

Vec sample_unit_sphere(std::mt19937_64& rng, int d) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec u(d);
  double norm_sq;
  do {
    norm_sq = 0.0;
    for (auto& v : u) {
      v = gauss(rng);
      norm_sq += v * v;
    }
  } while (norm_sq < 1e-280);  // guard against an all-underflow draw
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (auto& v : u) v *= inv_norm;
  return u;
}

GradientEstimate rand_two_point_estimate(const FiniteSumObjective& obj,
                                         int sample_index,
                                         std::span<const double> x,
                                         std::span<const double> u, double beta) {
  if (beta <= 0) throw std::invalid_argument("beta must be positive");
  if (u.size() != x.size()) throw std::invalid_argument("u has wrong dimension");
  double norm_sq = 0.0;
  for (double v : u) norm_sq += v * v;
  if (std::fabs(std::sqrt(norm_sq) - 1.0) > 1e-12) {
    throw std::invalid_argument("u must be a unit vector");
  }
  const int one[] = {sample_index};
  check_sample_range(obj, one);

  const int d = obj.dim();
  beta = clamp_smoothing(beta, x);
  Vec shifted(x.begin(), x.end());
  for (int j = 0; j < d; ++j) shifted[j] += beta * u[j];
  const double f_plus = obj.eval_component(sample_index, shifted);
  const double f_base = obj.eval_component(sample_index, x);
  const double scale = static_cast<double>(d) * (f_plus - f_base) / beta;

  GradientEstimate est;
  est.vector.resize(d);
  for (int j = 0; j < d; ++j) est.vector[j] = scale * u[j];
  est.queries_used = 2;
  return est;
}

GradientEstimate svrg_rand_inner(const FiniteSumObjective& obj,
                                 std::span<const int> batch,
                                 const std::vector<Vec>& us,
                                 std::span<const double> x_k,
                                 std::span<const double> x_anchor,
                                 std::span<const double> anchor_grad,
                                 double beta) {
  if (batch.size() != us.size()) {
    throw std::invalid_argument("batch and direction counts differ");
  }
  if (batch.empty()) throw std::invalid_argument("empty batch");

  const int d = obj.dim();
  GradientEstimate est;
  est.vector.assign(anchor_grad.begin(), anchor_grad.end());
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto at_k = rand_two_point_estimate(obj, batch[j], x_k, us[j], beta);
    const auto at_anchor =
        rand_two_point_estimate(obj, batch[j], x_anchor, us[j], beta);
    est.queries_used += at_k.queries_used + at_anchor.queries_used;
    for (int c = 0; c < d; ++c) {
      est.vector[c] += inv_m * (at_k.vector[c] - at_anchor.vector[c]);
    }
  }
  return est;
}

GradientEstimate svrg_coord_inner(const FiniteSumObjective& obj,
                                  std::span<const int> batch,
                                  std::span<const double> x_k,
                                  std::span<const double> x_anchor,
                                  std::span<const double> anchor_grad,
                                  double delta) {
  const auto at_k = coord_estimate(obj, batch, x_k, delta);
  const auto at_anchor = coord_estimate(obj, batch, x_anchor, delta);
  GradientEstimate est;
  est.queries_used = at_k.queries_used + at_anchor.queries_used;
  est.vector.resize(at_k.vector.size());
  for (std::size_t c = 0; c < est.vector.size(); ++c) {
    est.vector[c] = at_k.vector[c] - at_anchor.vector[c] + anchor_grad[c];
  }
  return est;
}

GradientEstimate spider_coord_step(const FiniteSumObjective& obj,
                                   std::span<const int> batch,
                                   std::span<const double> x_k,
                                   std::span<const double> x_prev,
                                   std::span<const double> v_prev, double delta) {
  for (double v : v_prev) {
    if (!std::isfinite(v)) throw std::invalid_argument("v_prev must be finite");
  }
  const auto at_k = coord_estimate(obj, batch, x_k, delta);
  const auto at_prev = coord_estimate(obj, batch, x_prev, delta);
  GradientEstimate est;
  est.queries_used = at_k.queries_used + at_prev.queries_used;
  est.vector.resize(at_k.vector.size());
  for (std::size_t c = 0; c < est.vector.size(); ++c) {
    est.vector[c] = at_k.vector[c] - at_prev.vector[c] + v_prev[c];
  }
  return est;
}

}  // namespace zovr
