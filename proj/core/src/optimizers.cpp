#include "zovr/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace zovr {

namespace {

bool all_finite(std::span<const double> v) {
  for (double value : v) {
    if (!std::isfinite(value)) return false;
  }
  return true;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double value : v) s += value * value;
  return s;
}

bool has_analytic_gradient(const FiniteSumObjective& obj) {
  return dynamic_cast<const DifferentiableObjective*>(&obj) != nullptr;
}

void validate(const FiniteSumObjective& obj, const HyperParams& hp) {
  if (!(hp.eta > 0)) throw std::invalid_argument("eta must be positive");
  if (hp.q < 1) throw std::invalid_argument("q must be >= 1");
  if (hp.K < 1) throw std::invalid_argument("K must be >= 1");
  if (hp.q > hp.K) throw std::invalid_argument("q must not exceed K");
  if (hp.s1 < 1 || hp.s1 > obj.num_components()) {
    throw std::invalid_argument("s1 must be in [1, n]");
  }
  if (hp.s2 < 1) throw std::invalid_argument("s2 must be >= 1");
  if (!(hp.smoothing.beta > 0) || !(hp.smoothing.delta > 0)) {
    throw std::invalid_argument("smoothing parameters must be positive");
  }
}

// Outer batch: the full index set when s1 == n (no generator draw, identical
// distribution), otherwise a without-replacement sample.
std::vector<int> sample_outer_batch(std::mt19937_64& rng, int n, int s1) {
  if (s1 == n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  return sample_without_replacement(rng, n, s1);
}

struct IterationContext {
  int k = 0;
  bool epoch_head = false;
  Vec& x;
  std::mt19937_64& rng;
  const FiniteSumObjective& obj;  // metered view
  QueryMeter& meter;
};

// Shared loop: k = 0..K with the iteration's estimate supplied by compute_v.
// Draw order per run: one output-index draw, then whatever compute_v draws
// each iteration. Rows are recorded after the estimate is built, so the
// queries column is the cumulative meter through iteration k.
template <typename ComputeV>
RunTrace drive(const FiniteSumObjective& base, const HyperParams& hp,
               const RunOptions& opts, const Regularizer* reg,
               ComputeV&& compute_v) {
  validate(base, hp);
  const int d = base.dim();
  if (!opts.x0.empty() && static_cast<int>(opts.x0.size()) != d) {
    throw std::invalid_argument("x0 has wrong dimension");
  }
  if (opts.trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");

  QueryMeter meter;
  MeteredObjective metered_obj(base, meter);
  std::mt19937_64 rng(hp.seed);

  RunTrace trace;
  trace.output_index = draw_output_index(rng, hp.K);

  Vec x = opts.x0.empty() ? Vec(d, 0.0) : opts.x0;
  const bool oracle = has_analytic_gradient(base);
  const Regularizer zero_reg = Regularizer::zero();
  const Regularizer& report_reg = reg ? *reg : zero_reg;

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&]() -> double {
    if (!opts.record_wall_time) return 0.0;
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  bool output_seen = false;
  std::int64_t last_recorded_k = -1;
  TraceRow pending{};
  bool have_pending = false;

  for (int k = 0; k <= hp.K; ++k) {
    if (opts.query_budget && meter.total() >= *opts.query_budget) break;

    IterationContext ctx{k, k % hp.q == 0, x, rng, metered_obj, meter};
    const Vec v = compute_v(ctx);

    TraceRow row;
    row.k = k;
    row.queries = meter.total();
    row.f_value = objective_value(base, x);
    row.grad_norm_sq =
        oracle ? squared_norm(generalized_gradient(base, x, hp.eta, report_reg))
               : std::numeric_limits<double>::quiet_NaN();
    row.wall_ms = wall_ms();

    const bool bad = !all_finite(v) || !std::isfinite(row.f_value);
    if (k % opts.trace_stride == 0 || k == hp.K || bad) {
      trace.rows.push_back(row);
      last_recorded_k = k;
      have_pending = false;
    } else {
      pending = row;
      have_pending = true;
    }

    if (opts.capture_iterates) trace.iterates.push_back(x);
    if (k == trace.output_index) {
      trace.output_x = x;
      output_seen = true;
    }
    if (bad) {
      trace.aborted_non_finite = true;
      break;
    }

    if (reg != nullptr) {
      Vec z(d);
      for (int j = 0; j < d; ++j) z[j] = x[j] - hp.eta * v[j];
      x = prox_map(z, hp.eta * reg->lambda, reg->kind);
    } else {
      for (int j = 0; j < d; ++j) x[j] = x[j] - hp.eta * v[j];
    }
    if (!all_finite(x)) {
      trace.aborted_non_finite = true;
      break;
    }
  }

  // Keep the last completed iteration visible even when the stride skipped it.
  if (have_pending && pending.k > last_recorded_k) trace.rows.push_back(pending);

  trace.final_x = x;
  if (!output_seen) {
    // Run ended before the drawn index (budget stop or abort); fall back to
    // the last iterate.
    trace.output_x = x;
    trace.output_index =
        trace.rows.empty() ? 0 : static_cast<int>(trace.rows.back().k);
  }
  trace.total_queries = meter.total();
  trace.outer_queries = meter.phase_total(QueryPhase::kOuter);
  trace.inner_queries = meter.phase_total(QueryPhase::kInner);
  return trace;
}

GradientEstimate two_point_batch_estimate(const FiniteSumObjective& obj,
                                          std::span<const int> batch,
                                          std::span<const double> x,
                                          std::mt19937_64& rng, double beta) {
  const int d = obj.dim();
  GradientEstimate est;
  est.vector.assign(d, 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (int i : batch) {
    const Vec u = sample_unit_sphere(rng, d);
    const auto one = rand_two_point_estimate(obj, i, x, u, beta);
    est.queries_used += one.queries_used;
    for (int j = 0; j < d; ++j) est.vector[j] += inv_m * one.vector[j];
  }
  return est;
}

}  // namespace

int draw_output_index(std::mt19937_64& rng, int K) {
  return std::uniform_int_distribution<int>(0, K)(rng);
}

std::vector<int> sample_without_replacement(std::mt19937_64& rng, int n,
                                            int count) {
  if (count < 1 || count > n) throw std::invalid_argument("bad sample count");
  if (count == n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  // Partial Fisher-Yates.
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::vector<int> sample_with_replacement(std::mt19937_64& rng, int n, int count) {
  if (count < 1) throw std::invalid_argument("bad sample count");
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> batch(count);
  for (auto& b : batch) b = pick(rng);
  return batch;
}

double baseline_stepsize(int d, double c) { return c / static_cast<double>(d); }

double Regularizer::value(std::span<const double> x) const {
  if (kind == Kind::kZero) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return lambda * s;
}

Vec prox_map(std::span<const double> z, double eta_times_lambda,
             Regularizer::Kind kind) {
  if (eta_times_lambda < 0) {
    throw std::invalid_argument("eta * lambda must be >= 0");
  }
  Vec out(z.begin(), z.end());
  if (kind == Regularizer::Kind::kZero) return out;
  for (auto& v : out) {
    const double mag = std::fabs(v) - eta_times_lambda;
    v = mag > 0 ? (v > 0 ? mag : -mag) : 0.0;
  }
  return out;
}

Vec generalized_gradient(const FiniteSumObjective& obj, std::span<const double> x,
                         double eta, const Regularizer& reg) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  Vec grad = analytic_gradient(obj, x);
  // The zero regularizer collapses (x - prox(x - eta g)) / eta to g itself.
  if (reg.kind == Regularizer::Kind::kZero) return grad;
  const int d = obj.dim();
  Vec z(d);
  for (int j = 0; j < d; ++j) z[j] = x[j] - eta * grad[j];
  const Vec x_plus = prox_map(z, eta * reg.lambda, reg.kind);
  Vec g(d);
  for (int j = 0; j < d; ++j) g[j] = (x[j] - x_plus[j]) / eta;
  return g;
}

RunTrace run_zo_svrg_coord_rand(const FiniteSumObjective& obj,
                                const HyperParams& hp, const RunOptions& opts) {
  const int n = obj.num_components();
  const int d = obj.dim();
  Vec anchor_x, anchor_grad;
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    if (ctx.epoch_head) {
      ctx.meter.set_phase(QueryPhase::kOuter);
      const auto s1 = sample_outer_batch(ctx.rng, n, hp.s1);
      anchor_x = ctx.x;
      anchor_grad = coord_estimate(ctx.obj, s1, ctx.x, hp.smoothing.delta).vector;
      return anchor_grad;
    }
    ctx.meter.set_phase(QueryPhase::kInner);
    const auto batch = sample_with_replacement(ctx.rng, n, hp.s2);
    std::vector<Vec> us;
    us.reserve(batch.size());
    for (std::size_t j = 0; j < batch.size(); ++j) {
      us.push_back(sample_unit_sphere(ctx.rng, d));
    }
    return svrg_rand_inner(ctx.obj, batch, us, ctx.x, anchor_x, anchor_grad,
                           hp.smoothing.beta)
        .vector;
  });
}

RunTrace run_zo_svrg_coord(const FiniteSumObjective& obj, const HyperParams& hp,
                           const RunOptions& opts) {
  const int n = obj.num_components();
  Vec anchor_x, anchor_grad;
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    if (ctx.epoch_head) {
      ctx.meter.set_phase(QueryPhase::kOuter);
      const auto s1 = sample_outer_batch(ctx.rng, n, hp.s1);
      anchor_x = ctx.x;
      anchor_grad = coord_estimate(ctx.obj, s1, ctx.x, hp.smoothing.delta).vector;
      return anchor_grad;
    }
    ctx.meter.set_phase(QueryPhase::kInner);
    const auto batch = sample_with_replacement(ctx.rng, n, hp.s2);
    return svrg_coord_inner(ctx.obj, batch, ctx.x, anchor_x, anchor_grad,
                            hp.smoothing.delta)
        .vector;
  });
}

namespace {

template <typename RegArg>
RunTrace spider_loop(const FiniteSumObjective& obj, const HyperParams& hp,
                     const RunOptions& opts, RegArg reg) {
  const int n = obj.num_components();
  Vec prev_x, prev_v;
  return drive(obj, hp, opts, reg, [&](IterationContext& ctx) -> Vec {
    Vec v;
    if (ctx.epoch_head) {
      ctx.meter.set_phase(QueryPhase::kOuter);
      const auto s1 = sample_outer_batch(ctx.rng, n, hp.s1);
      v = coord_estimate(ctx.obj, s1, ctx.x, hp.smoothing.delta).vector;
    } else {
      ctx.meter.set_phase(QueryPhase::kInner);
      const auto batch = sample_with_replacement(ctx.rng, n, hp.s2);
      v = spider_coord_step(ctx.obj, batch, ctx.x, prev_x, prev_v,
                            hp.smoothing.delta)
              .vector;
    }
    prev_x = ctx.x;
    prev_v = v;
    return v;
  });
}

}  // namespace

RunTrace run_zo_spider_coord(const FiniteSumObjective& obj, const HyperParams& hp,
                             const RunOptions& opts) {
  return spider_loop(obj, hp, opts, static_cast<const Regularizer*>(nullptr));
}

RunTrace run_prox_zo_spider_coord(const FiniteSumObjective& obj,
                                  const Regularizer& reg, const HyperParams& hp,
                                  const RunOptions& opts) {
  return spider_loop(obj, hp, opts, &reg);
}

RunTrace run_zo_svrg_coord_rand_c(const FiniteSumObjective& obj,
                                  const HyperParams& hp, const RunOptions& opts) {
  const int n = obj.num_components();
  const int d = obj.dim();
  Vec anchor_x, v_epoch;
  std::vector<Vec> epoch_iterates;
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    Vec v;
    if (ctx.epoch_head) {
      ctx.meter.set_phase(QueryPhase::kOuter);
      if (ctx.k > 0) {
        // Restart the epoch from a uniformly random iterate of the previous
        // epoch.
        const int pick = std::uniform_int_distribution<int>(
            0, static_cast<int>(epoch_iterates.size()) - 1)(ctx.rng);
        ctx.x = epoch_iterates[pick];
      }
      epoch_iterates.clear();
      const auto s1 = sample_outer_batch(ctx.rng, n, hp.s1);
      anchor_x = ctx.x;
      v_epoch = coord_estimate(ctx.obj, s1, ctx.x, hp.smoothing.delta).vector;
      v = v_epoch;
    } else {
      ctx.meter.set_phase(QueryPhase::kInner);
      const int sample = sample_with_replacement(ctx.rng, n, 1)[0];
      const std::vector<Vec> us = {sample_unit_sphere(ctx.rng, d)};
      const int batch[] = {sample};
      v = svrg_rand_inner(ctx.obj, batch, us, ctx.x, anchor_x, v_epoch,
                          hp.smoothing.beta)
              .vector;
    }
    epoch_iterates.push_back(ctx.x);
    return v;
  });
}

RunTrace run_zo_spider_coord_c(const FiniteSumObjective& obj,
                               const HyperParams& hp, const RunOptions& opts) {
  const int n = obj.num_components();
  Vec prev_x, prev_v;
  std::vector<Vec> epoch_iterates;
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    Vec v;
    if (ctx.epoch_head) {
      ctx.meter.set_phase(QueryPhase::kOuter);
      if (ctx.k > 0) {
        const int pick = std::uniform_int_distribution<int>(
            0, static_cast<int>(epoch_iterates.size()) - 1)(ctx.rng);
        ctx.x = epoch_iterates[pick];
      }
      epoch_iterates.clear();
      const auto s1 = sample_outer_batch(ctx.rng, n, hp.s1);
      v = coord_estimate(ctx.obj, s1, ctx.x, hp.smoothing.delta).vector;
    } else {
      ctx.meter.set_phase(QueryPhase::kInner);
      const int sample = sample_with_replacement(ctx.rng, n, 1)[0];
      const int batch[] = {sample};
      v = spider_coord_step(ctx.obj, batch, ctx.x, prev_x, prev_v,
                            hp.smoothing.delta)
              .vector;
    }
    epoch_iterates.push_back(ctx.x);
    prev_x = ctx.x;
    prev_v = v;
    return v;
  });
}

RunTrace run_zo_gd(const FiniteSumObjective& obj, const HyperParams& hp,
                   const RunOptions& opts) {
  const int n = obj.num_components();
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    ctx.meter.set_phase(QueryPhase::kOuter);
    return two_point_batch_estimate(ctx.obj, all, ctx.x, ctx.rng,
                                    hp.smoothing.beta)
        .vector;
  });
}

RunTrace run_zo_sgd(const FiniteSumObjective& obj, const HyperParams& hp,
                    const RunOptions& opts) {
  const int n = obj.num_components();
  return drive(obj, hp, opts, nullptr, [&](IterationContext& ctx) -> Vec {
    ctx.meter.set_phase(QueryPhase::kInner);
    const auto batch = sample_with_replacement(ctx.rng, n, hp.s2);
    return two_point_batch_estimate(ctx.obj, batch, ctx.x, ctx.rng,
                                    hp.smoothing.beta)
        .vector;
  });
}

RunTrace run_algorithm(const std::string& name, const FiniteSumObjective& obj,
                       const Regularizer& reg, const HyperParams& hp,
                       const RunOptions& opts) {
  if (name == "zo-svrg-coord-rand") return run_zo_svrg_coord_rand(obj, hp, opts);
  if (name == "zo-svrg-coord") return run_zo_svrg_coord(obj, hp, opts);
  if (name == "zo-spider-coord") return run_zo_spider_coord(obj, hp, opts);
  if (name == "prox-zo-spider-coord") {
    return run_prox_zo_spider_coord(obj, reg, hp, opts);
  }
  if (name == "zo-svrg-coord-rand-c") {
    return run_zo_svrg_coord_rand_c(obj, hp, opts);
  }
  if (name == "zo-spider-coord-c") return run_zo_spider_coord_c(obj, hp, opts);
  if (name == "zo-gd") return run_zo_gd(obj, hp, opts);
  if (name == "zo-sgd") return run_zo_sgd(obj, hp, opts);
  throw std::invalid_argument("unknown algorithm: " + name);
}

namespace {

// Smallest m >= 1 with m^power >= value, exact in integers.
std::int64_t ceil_root(std::int64_t value, int power) {
  if (value <= 1) return 1;
  auto pow_ge = [power, value](std::int64_t m) {
    __int128 acc = 1;
    for (int i = 0; i < power; ++i) {
      acc *= m;
      if (acc >= value) return true;
    }
    return acc >= value;
  };
  std::int64_t m = std::llround(
      std::pow(static_cast<double>(value), 1.0 / static_cast<double>(power)));
  m = std::max<std::int64_t>(m, 1);
  while (m > 1 && pow_ge(m - 1)) --m;
  while (!pow_ge(m)) ++m;
  return m;
}

}  // namespace

HyperParams select_params(Corollary which, std::int64_t n, int d,
                          std::int64_t K, double L) {
  if (n < 1 || d < 1 || K < 1 || !(L > 0)) {
    throw std::invalid_argument("n, d, K, L must be positive");
  }
  const double dd = static_cast<double>(d);
  const double dK = static_cast<double>(K);
  HyperParams hp;
  hp.K = static_cast<int>(K);
  switch (which) {
    case Corollary::kCor1: {
      const std::int64_t s1 = std::min(n, K);
      const std::int64_t q = ceil_root(s1, 3);
      hp.eta = 1.0 / (20.0 * L);
      hp.s1 = static_cast<int>(s1);
      hp.q = static_cast<int>(q);
      hp.s2 = static_cast<int>(d * q * q);
      hp.smoothing.beta = 1.0 / (L * dd * std::sqrt(dK));
      hp.smoothing.delta = 1.0 / (L * std::sqrt(dd * dK));
      break;
    }
    case Corollary::kCor2: {
      const std::int64_t s1 = std::min(
          n, static_cast<std::int64_t>(std::ceil(std::pow(dK / dd, 0.6))));
      const std::int64_t q = s1 * d;
      const double s1_cbrt = std::cbrt(static_cast<double>(s1));
      hp.eta = 1.0 / (20.0 * std::cbrt(dd) *
                      std::pow(static_cast<double>(q), 2.0 / 3.0) * L);
      hp.s1 = static_cast<int>(s1);
      hp.q = static_cast<int>(q);
      hp.s2 = 1;
      hp.smoothing.beta = s1_cbrt / (L * std::sqrt(dd * dK));
      hp.smoothing.delta = s1_cbrt / (L * std::sqrt(dK));
      break;
    }
    case Corollary::kCor3: {
      const std::int64_t s1 = std::min(n, K);
      const std::int64_t q = ceil_root(s1, 2);
      hp.eta = 1.0 / (4.0 * L);
      hp.s1 = static_cast<int>(s1);
      hp.q = static_cast<int>(q);
      hp.s2 = static_cast<int>(q);
      hp.smoothing.delta = 1.0 / (std::sqrt(dK * dd) * L);
      hp.smoothing.beta = hp.smoothing.delta;
      break;
    }
    case Corollary::kCor4: {
      // ceil(K^{2/3}) = ceil_root(K^2, 3), exact.
      const std::int64_t q = std::min(n, ceil_root(K * K, 3));
      hp.eta = 1.0 / (4.0 * L * std::sqrt(static_cast<double>(q)));
      hp.s1 = static_cast<int>(q);
      hp.q = static_cast<int>(q);
      hp.s2 = 1;
      hp.smoothing.delta =
          1.0 / (std::sqrt(static_cast<double>(q) * dK * dd) * L);
      hp.smoothing.beta = hp.smoothing.delta;
      break;
    }
    case Corollary::kTheorem2: {
      const std::int64_t s1 = std::min(n, K);
      const std::int64_t q = ceil_root(s1, 3);
      hp.eta = 1.0 / (15.0 * L);
      hp.s1 = static_cast<int>(s1);
      hp.q = static_cast<int>(q);
      hp.s2 = static_cast<int>(q * q);
      hp.smoothing.delta = 1.0 / (L * std::sqrt(dd * dK));
      hp.smoothing.beta = hp.smoothing.delta;
      break;
    }
  }
  return hp;
}

}  // namespace zovr
