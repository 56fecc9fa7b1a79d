#include "zovr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "zovr/optimizers.hpp"

namespace zovr {

namespace {

double indicator_over_s1(const BoundInputs& in) {
  return in.s1 < in.n ? 1.0 / static_cast<double>(in.s1) : 0.0;
}

void check_common(const BoundInputs& in) {
  if (!(in.L > 0) || in.d < 1 || in.n < 1 || in.s1 < 1 || in.s2 < 1) {
    throw std::invalid_argument("bound inputs must be positive");
  }
  if (in.sigma2 < 0 || in.beta < 0 || in.delta < 0 || in.dist_sq < 0) {
    throw std::invalid_argument("bound inputs must be nonnegative");
  }
}

}  // namespace

double lemma1_bound(const BoundInputs& in) {
  check_common(in);
  const double L2 = in.L * in.L;
  const double d = static_cast<double>(in.d);
  const double s2 = static_cast<double>(in.s2);
  const double outer = 18.0 * indicator_over_s1(in) *
                       (2.0 * L2 * d * in.delta * in.delta + in.sigma2);
  return 6.0 * d * L2 * in.dist_sq / s2 +
         3.0 * L2 * in.beta * in.beta * d * d / s2 + outer +
         6.0 * L2 * d * in.delta * in.delta +
         1.5 * in.beta * in.beta * L2 * d * d;
}

double lemma2_bound(const BoundInputs& in) {
  check_common(in);
  const double L2 = in.L * in.L;
  const double d = static_cast<double>(in.d);
  const double s2 = static_cast<double>(in.s2);
  const double outer = 6.0 * indicator_over_s1(in) *
                       (2.0 * L2 * d * in.delta * in.delta + in.sigma2);
  return 12.0 * L2 * d * in.delta * in.delta / s2 +
         6.0 * L2 * in.dist_sq / s2 + outer;
}

double lemma3_bound(const BoundInputs& in, double sum_v_sq, int k_minus_anchor) {
  check_common(in);
  if (sum_v_sq < 0 || k_minus_anchor < 0) {
    throw std::invalid_argument("sum_v_sq and k offset must be nonnegative");
  }
  const double L2 = in.L * in.L;
  const double d = static_cast<double>(in.d);
  const double s2 = static_cast<double>(in.s2);
  return 3.0 * in.eta * in.eta * L2 / s2 * sum_v_sq +
         static_cast<double>(k_minus_anchor) * 6.0 * L2 * d * in.delta *
             in.delta / s2 +
         3.0 * indicator_over_s1(in) *
             (2.0 * L2 * d * in.delta * in.delta + in.sigma2);
}

std::pair<double, double> smoothing_gaps(double L, int d, double beta) {
  if (!(L > 0) || d < 1 || beta < 0) {
    throw std::invalid_argument("bad smoothing-gap inputs");
  }
  return {beta * beta * L / 2.0, beta * L * static_cast<double>(d) / 2.0};
}

Theorem1Constants theorem1_constants(const BoundInputs& in, double g) {
  check_common(in);
  const double d = static_cast<double>(in.d);
  const double s2 = static_cast<double>(in.s2);
  const double q = static_cast<double>(in.q);
  const double L = in.L;
  const double eta = in.eta;
  Theorem1Constants out{};
  out.g = g > 0 ? g : 4000.0 * d * eta * eta * L * L * L * q / s2;
  const double growth = eta * out.g + 12.0 * eta * eta * d * L * L / s2;
  out.c = 9.0 * d * L * L * L * eta * eta / s2 *
          (std::pow(1.0 + growth, q) - 1.0) / growth;
  out.lambda = eta / 4.0 - 4.0 * out.c * eta / out.g - 1.5 * L * eta * eta;
  out.rho = (6.0 * eta * eta * L + out.c * eta / out.g) * L * L * d * d *
            in.beta * in.beta;
  out.chi = in.beta * in.beta * L * L * d * d +
            9.0 * indicator_over_s1(in) *
                (2.0 * L * L * d * in.delta * in.delta + in.sigma2) +
            3.0 * L * L * d * in.delta * in.delta;
  out.tau = (eta / 2.0 + 2.0 * out.c * eta / out.g + 4.0 * out.c * eta * eta +
             3.0 * L * eta * eta) *
                out.chi +
            out.rho;
  return out;
}

Theorem3Constants theorem3_constants(const BoundInputs& in) {
  check_common(in);
  const double d = static_cast<double>(in.d);
  const double s2 = static_cast<double>(in.s2);
  const double q = static_cast<double>(in.q);
  Theorem3Constants out{};
  out.phi = in.eta / 2.0 - in.eta * in.eta * in.L / 2.0 -
            3.0 * in.L * in.L * in.eta * in.eta * in.eta * q / s2;
  out.theta = 3.0 * q * in.L * in.L * d * in.delta * in.delta / s2 +
              3.0 * indicator_over_s1(in) *
                  (2.0 * in.L * in.L * d * in.delta * in.delta + in.sigma2);
  return out;
}

double empirical_sigma2(const FiniteSumObjective& obj,
                        std::span<const Vec> probes) {
  const int n = obj.num_components();
  const int d = obj.dim();
  const auto* diff = dynamic_cast<const DifferentiableObjective*>(&obj);
  if (diff == nullptr) {
    throw std::runtime_error("empirical_sigma2 needs an analytic gradient");
  }
  double worst = 0.0;
  Vec g_i(d);
  for (const auto& x : probes) {
    const Vec mean = analytic_gradient(obj, x);
    double avg = 0.0;
    for (int i = 0; i < n; ++i) {
      diff->component_gradient(i, x, g_i);
      double dev = 0.0;
      for (int j = 0; j < d; ++j) {
        const double diff_j = g_i[j] - mean[j];
        dev += diff_j * diff_j;
      }
      avg += dev;
    }
    worst = std::max(worst, avg / static_cast<double>(n));
  }
  return worst;
}

namespace {

constexpr int kMcShards = 8;

// Deterministic sharded Monte-Carlo mean of a scalar draw: the shard count
// and per-shard streams are fixed, reduction runs in shard order, so results
// do not depend on scheduling.
template <typename DrawFn>
MonteCarloStat sharded_mc(std::int64_t draws, std::uint64_t seed, DrawFn&& draw) {
  if (draws < 2) throw std::invalid_argument("need at least 2 draws");
  struct ShardSums {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<std::future<ShardSums>> futures;
  std::int64_t start = 0;
  for (int shard = 0; shard < kMcShards; ++shard) {
    const std::int64_t count =
        draws / kMcShards + (shard < draws % kMcShards ? 1 : 0);
    futures.push_back(std::async(
        std::launch::async,
        [count, shard, seed, &draw]() {
          std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL *
                                         static_cast<std::uint64_t>(shard + 1));
          ShardSums sums;
          for (std::int64_t i = 0; i < count; ++i) {
            const double v = draw(rng);
            sums.sum += v;
            sums.sum_sq += v * v;
          }
          return sums;
        }));
    start += count;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (auto& f : futures) {
    const auto s = f.get();
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  MonteCarloStat stat;
  stat.draws = draws;
  stat.mean = sum / static_cast<double>(draws);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(draws) - stat.mean * stat.mean);
  stat.std_error = std::sqrt(var / static_cast<double>(draws));
  return stat;
}

Vec sample_unit_ball(std::mt19937_64& rng, int d) {
  Vec u = sample_unit_sphere(rng, d);
  const double r = std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng),
                            1.0 / static_cast<double>(d));
  for (auto& v : u) v *= r;
  return u;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

Vec smoothed_gradient_ball_mc(const FiniteSumObjective& obj,
                              std::span<const double> x, double beta,
                              std::int64_t draws, std::uint64_t seed) {
  const int d = obj.dim();
  // Per-coordinate means via the same fixed-shard scheme; one pass.
  std::vector<std::future<Vec>> futures;
  for (int shard = 0; shard < kMcShards; ++shard) {
    const std::int64_t count =
        draws / kMcShards + (shard < draws % kMcShards ? 1 : 0);
    futures.push_back(std::async(std::launch::async, [&, count, shard]() {
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL *
                                     static_cast<std::uint64_t>(shard + 1));
      Vec acc(d, 0.0), y(x.begin(), x.end());
      for (std::int64_t i = 0; i < count; ++i) {
        const Vec u = sample_unit_ball(rng, d);
        for (int j = 0; j < d; ++j) y[j] = x[j] + beta * u[j];
        const Vec g = analytic_gradient(obj, y);
        for (int j = 0; j < d; ++j) acc[j] += g[j];
      }
      return acc;
    }));
  }
  Vec total(d, 0.0);
  for (auto& f : futures) {
    const Vec acc = f.get();
    for (int j = 0; j < d; ++j) total[j] += acc[j];
  }
  for (auto& v : total) v /= static_cast<double>(draws);
  return total;
}

MonteCarloStat smoothed_value_gap_mc(const FiniteSumObjective& obj,
                                     std::span<const double> x, double beta,
                                     std::int64_t draws, std::uint64_t seed) {
  const int d = obj.dim();
  const double f_x = objective_value(obj, x);
  const Vec x_copy(x.begin(), x.end());
  // Antithetic pairs: the ball law is symmetric, so averaging the +u and -u
  // evaluations keeps the mean and cancels the first-order variance term.
  return sharded_mc(draws, seed, [&, d](std::mt19937_64& rng) {
    const Vec u = sample_unit_ball(rng, d);
    Vec plus(d), minus(d);
    for (int j = 0; j < d; ++j) {
      plus[j] = x_copy[j] + beta * u[j];
      minus[j] = x_copy[j] - beta * u[j];
    }
    return 0.5 * (objective_value(obj, plus) + objective_value(obj, minus)) -
           f_x;
  });
}

MonteCarloStat mc_svrg_rand_variance(const FiniteSumObjective& obj,
                                     std::span<const double> x_k,
                                     std::span<const double> x_anchor,
                                     std::span<const double> grad_beta_x_k,
                                     int s1, int s2, double beta, double delta,
                                     std::int64_t draws, std::uint64_t seed) {
  const int n = obj.num_components();
  const int d = obj.dim();
  const Vec xk(x_k.begin(), x_k.end());
  const Vec xa(x_anchor.begin(), x_anchor.end());
  const Vec target(grad_beta_x_k.begin(), grad_beta_x_k.end());

  // With a full outer batch the anchor estimate is deterministic; compute it
  // once outside the loop.
  Vec fixed_anchor;
  if (s1 == n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    fixed_anchor = coord_estimate(obj, all, xa, delta).vector;
  }

  return sharded_mc(draws, seed, [&, d, n, s1, s2](std::mt19937_64& rng) {
    Vec anchor_grad = fixed_anchor;
    if (anchor_grad.empty()) {
      const auto batch = sample_without_replacement(rng, n, s1);
      anchor_grad = coord_estimate(obj, batch, xa, delta).vector;
    }
    const auto batch = sample_with_replacement(rng, n, s2);
    std::vector<Vec> us;
    us.reserve(batch.size());
    for (int j = 0; j < s2; ++j) us.push_back(sample_unit_sphere(rng, d));
    const Vec v =
        svrg_rand_inner(obj, batch, us, xk, xa, anchor_grad, beta).vector;
    return sq_dist(v, target);
  });
}

MonteCarloStat mc_svrg_coord_variance(const FiniteSumObjective& obj,
                                      std::span<const double> x_k,
                                      std::span<const double> x_anchor,
                                      int s1, int s2, double delta,
                                      std::int64_t draws, std::uint64_t seed) {
  const int n = obj.num_components();
  const Vec xk(x_k.begin(), x_k.end());
  const Vec xa(x_anchor.begin(), x_anchor.end());
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const Vec target = coord_estimate(obj, all, xk, delta).vector;

  Vec fixed_anchor;
  if (s1 == n) fixed_anchor = coord_estimate(obj, all, xa, delta).vector;

  return sharded_mc(draws, seed, [&, n, s1, s2](std::mt19937_64& rng) {
    Vec anchor_grad = fixed_anchor;
    if (anchor_grad.empty()) {
      const auto batch = sample_without_replacement(rng, n, s1);
      anchor_grad = coord_estimate(obj, batch, xa, delta).vector;
    }
    const auto batch = sample_with_replacement(rng, n, s2);
    const Vec v =
        svrg_coord_inner(obj, batch, xk, xa, anchor_grad, delta).vector;
    return sq_dist(v, target);
  });
}

SpiderMcResult mc_spider_variance(const FiniteSumObjective& obj,
                                  std::span<const double> x_anchor, int s1,
                                  int s2, int steps, double eta, double delta,
                                  std::int64_t draws, std::uint64_t seed) {
  const int n = obj.num_components();
  const int d = obj.dim();
  const Vec xa(x_anchor.begin(), x_anchor.end());
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  Vec fixed_anchor;
  if (s1 == n) fixed_anchor = coord_estimate(obj, all, xa, delta).vector;

  // Each draw simulates `steps` recursive inner updates from the anchor and
  // reports (final error, running sum of ||v^t||^2 over t < k). The two
  // statistics share draws, so accumulate them together.
  struct Pair {
    double err;
    double sum_v;
  };
  std::vector<std::future<std::vector<Pair>>> futures;
  for (int shard = 0; shard < kMcShards; ++shard) {
    const std::int64_t count =
        draws / kMcShards + (shard < draws % kMcShards ? 1 : 0);
    futures.push_back(std::async(std::launch::async, [&, count, shard]() {
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL *
                                     static_cast<std::uint64_t>(shard + 1));
      std::vector<Pair> out;
      out.reserve(count);
      for (std::int64_t i = 0; i < count; ++i) {
        Vec v = fixed_anchor;
        if (v.empty()) {
          const auto batch = sample_without_replacement(rng, n, s1);
          v = coord_estimate(obj, batch, xa, delta).vector;
        }
        Vec x = xa, prev_x(d);
        double sum_v_sq = 0.0;
        for (int t = 0; t < steps; ++t) {
          sum_v_sq += sq_dist(v, Vec(d, 0.0));
          prev_x = x;
          for (int j = 0; j < d; ++j) x[j] -= eta * v[j];
          const auto batch = sample_with_replacement(rng, n, s2);
          v = spider_coord_step(obj, batch, x, prev_x, v, delta).vector;
        }
        const Vec target = coord_estimate(obj, all, x, delta).vector;
        out.push_back({sq_dist(v, target), sum_v_sq});
      }
      return out;
    }));
  }

  double err_sum = 0, err_sq = 0, sv_sum = 0, sv_sq = 0;
  std::int64_t total = 0;
  for (auto& f : futures) {
    for (const auto& p : f.get()) {
      err_sum += p.err;
      err_sq += p.err * p.err;
      sv_sum += p.sum_v;
      sv_sq += p.sum_v * p.sum_v;
      ++total;
    }
  }
  auto finish = [total](double sum, double sum_sq) {
    MonteCarloStat stat;
    stat.draws = total;
    stat.mean = sum / static_cast<double>(total);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(total) - stat.mean * stat.mean);
    stat.std_error = std::sqrt(var / static_cast<double>(total));
    return stat;
  };
  return {finish(err_sum, err_sq), finish(sv_sum, sv_sq)};
}

}  // namespace zovr
