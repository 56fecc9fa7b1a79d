#include "zovr/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "zovr/bounds.hpp"
#include "zovr/data_io.hpp"
#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"
#include "zovr/optimizers.hpp"

namespace zovr {

namespace {

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

Vec random_point(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vec x(d);
  for (auto& v : x) v = unif(rng);
  return x;
}

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double value : v) s += value * value;
  return s;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

std::unique_ptr<DifferentiableObjective> test_logreg(int n, int d,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto data = make_synthetic_logreg_data(rng, n, d, 1.5);
  return make_nonconvex_logreg(data, 0.1, d);
}

std::unique_ptr<DifferentiableObjective> random_psd_quadratic(
    int d, std::uint64_t seed, double ridge = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // A = M^T M / d + ridge I is symmetric positive definite.
  std::vector<Vec> m(d, Vec(d));
  for (auto& row : m) {
    for (auto& v : row) v = gauss(rng);
  }
  std::vector<Vec> a(d, Vec(d, 0.0));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      double s = 0.0;
      for (int t = 0; t < d; ++t) s += m[t][r] * m[t][c];
      a[r][c] = s / static_cast<double>(d) + (r == c ? ridge : 0.0);
    }
  }
  Vec b(d);
  for (auto& v : b) v = gauss(rng);
  return make_quadratic(a, b);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  fit.r2 = syy > 0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// --- estimator checks -------------------------------------------------------

CheckResult check_coord_bias(const std::string& name,
                             const FiniteSumObjective& obj, double scale,
                             std::uint64_t seed) {
  const int d = obj.dim();
  const double L = obj.metadata().smoothness_L.value();
  const auto samples = all_indices(obj.num_components());
  std::mt19937_64 rng(seed);
  int violations = 0;
  double worst_ratio = 0.0;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double bound = L * L * static_cast<double>(d) * delta * delta;
    for (int p = 0; p < 100; ++p) {
      const Vec x = random_point(rng, d, scale);
      const Vec est = coord_estimate(obj, samples, x, delta).vector;
      const Vec grad = analytic_gradient(obj, x);
      const double err = sq_dist(est, grad);
      worst_ratio = std::max(worst_ratio, err / bound);
      if (err > bound) ++violations;
    }
  }
  return {name, violations == 0,
          format("violations=%d worst err/bound=%.3g", violations, worst_ratio)};
}

CheckResult check_coord_exact_quadratic() {
  auto obj = random_psd_quadratic(5, 11);
  std::mt19937_64 rng(3);
  const auto samples = all_indices(1);
  double worst = 0.0;
  for (double delta : {1e-1, 1e-3, 1e-5}) {
    for (int p = 0; p < 20; ++p) {
      const Vec x = random_point(rng, 5, 2.0);
      const Vec est = coord_estimate(*obj, samples, x, delta).vector;
      const Vec grad = analytic_gradient(*obj, x);
      worst = std::max(worst, std::sqrt(sq_dist(est, grad)));
    }
  }
  return {"coord-exact-quadratic", worst <= 1e-9,
          format("worst abs err=%.3g (tol 1e-9)", worst)};
}

CheckResult check_sphere_norm() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int d : {1, 2, 7, 40}) {
    for (int i = 0; i < 500; ++i) {
      const Vec u = sample_unit_sphere(rng, d);
      worst = std::max(worst, std::fabs(std::sqrt(sq_norm(u)) - 1.0));
    }
  }
  return {"sphere-norm", worst <= 1e-12, format("worst | ||u||-1 |=%.3g", worst)};
}

CheckResult check_sphere_sign_frequency() {
  std::mt19937_64 rng(7);
  int positives = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (sample_unit_sphere(rng, 1)[0] > 0) ++positives;
  }
  const double freq = static_cast<double>(positives) / draws;
  return {"sphere-sign-frequency-d1", freq >= 0.47 && freq <= 0.53,
          format("freq(+1)=%.4f (want [0.47, 0.53])", freq)};
}

CheckResult check_sphere_second_moment() {
  const int d = 3;
  const int draws = 100000;
  std::mt19937_64 rng(9);
  double moment[3][3] = {};
  for (int i = 0; i < draws; ++i) {
    const Vec u = sample_unit_sphere(rng, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) moment[r][c] += u[r] * u[c];
    }
  }
  double worst = 0.0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const double want = r == c ? 1.0 / d : 0.0;
      worst = std::max(worst, std::fabs(moment[r][c] / draws - want));
    }
  }
  return {"sphere-second-moment", worst <= 0.01,
          format("max entry error vs I/d = %.4g (tol 0.01)", worst)};
}

CheckResult check_two_point_unbiased() {
  auto obj = random_psd_quadratic(3, 13);
  const Vec x = {0.4, -1.1, 0.7};
  const Vec grad = analytic_gradient(*obj, x);
  const int draws = 100000;
  std::mt19937_64 rng(15);
  Vec sum(3, 0.0), sum_sq(3, 0.0);
  for (int i = 0; i < draws; ++i) {
    const Vec u = sample_unit_sphere(rng, 3);
    const Vec est = rand_two_point_estimate(*obj, 0, x, u, 1e-4).vector;
    for (int j = 0; j < 3; ++j) {
      sum[j] += est[j];
      sum_sq[j] += est[j] * est[j];
    }
  }
  double worst_sigmas = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / draws;
    const double var = std::max(0.0, sum_sq[j] / draws - mean * mean);
    const double se = std::sqrt(var / draws);
    worst_sigmas = std::max(worst_sigmas, std::fabs(mean - grad[j]) / se);
  }
  return {"two-point-unbiased-quadratic", worst_sigmas <= 4.0,
          format("worst |mean-grad|/SE = %.2f (tol 4)", worst_sigmas)};
}

CheckResult check_query_accounting() {
  auto obj = test_logreg(6, 4, 21);
  QueryMeter meter;
  const auto metered_obj = metered(*obj, meter);
  std::mt19937_64 rng(23);
  const Vec x = random_point(rng, 4, 1.0);
  const Vec y = random_point(rng, 4, 1.0);
  const Vec v0(4, 0.1);
  const auto batch = all_indices(6);
  const std::vector<int> small_batch = {1, 3};
  std::vector<Vec> us = {sample_unit_sphere(rng, 4), sample_unit_sphere(rng, 4)};

  bool ok = true;
  std::string detail;
  auto expect = [&](const char* what, const GradientEstimate& est,
                    std::int64_t before, std::int64_t formula) {
    const std::int64_t delta = meter.total() - before;
    if (est.queries_used != delta || delta != formula) {
      ok = false;
      detail += format("%s: used=%lld meter=%lld formula=%lld; ", what,
                       static_cast<long long>(est.queries_used),
                       static_cast<long long>(delta),
                       static_cast<long long>(formula));
    }
  };

  std::int64_t before = meter.total();
  expect("coord(full)", coord_estimate(metered_obj, batch, x, 1e-3), before,
         2 * 4 * 6);
  before = meter.total();
  expect("two-point", rand_two_point_estimate(metered_obj, 2, x, us[0], 1e-2),
         before, 2);
  before = meter.total();
  expect("svrg-rand-inner",
         svrg_rand_inner(metered_obj, small_batch, us, x, y, v0, 1e-2), before,
         4 * 2);
  before = meter.total();
  expect("svrg-coord-inner",
         svrg_coord_inner(metered_obj, small_batch, x, y, v0, 1e-3), before,
         4 * 4 * 2);
  before = meter.total();
  expect("spider-step",
         spider_coord_step(metered_obj, small_batch, x, y, v0, 1e-3), before,
         4 * 4 * 2);
  if (ok) detail = format("all five estimators exact, meter total=%lld",
                          static_cast<long long>(meter.total()));
  return {"query-accounting", ok, detail};
}

// --- lemma checks ------------------------------------------------------------

struct LemmaInstance {
  std::unique_ptr<DifferentiableObjective> obj;
  Vec x_anchor;
  Vec x_k;
  double L = 0;
  double sigma2 = 0;
};

LemmaInstance lemma_instance() {
  LemmaInstance inst;
  inst.obj = test_logreg(6, 3, 31);
  inst.L = inst.obj->metadata().smoothness_L.value();
  std::mt19937_64 rng(33);
  inst.x_anchor = random_point(rng, 3, 0.8);
  inst.x_k = inst.x_anchor;
  for (auto& v : inst.x_k) v += 0.15;
  std::vector<Vec> probes = {inst.x_anchor, inst.x_k};
  for (int i = 0; i < 100; ++i) probes.push_back(random_point(rng, 3, 1.0));
  inst.sigma2 = empirical_sigma2(*inst.obj, probes);
  return inst;
}

CheckResult check_lemma1(const LemmaInstance& inst, int s1, const char* name) {
  const double beta = 0.01, delta = 0.001;
  const int s2 = 2;
  const Vec grad_beta =
      smoothed_gradient_ball_mc(*inst.obj, inst.x_k, beta, 200000, 901);
  const auto stat =
      mc_svrg_rand_variance(*inst.obj, inst.x_k, inst.x_anchor, grad_beta, s1,
                            s2, beta, delta, 10000, 903);
  BoundInputs in;
  in.L = inst.L;
  in.sigma2 = inst.sigma2;
  in.d = 3;
  in.n = 6;
  in.s1 = s1;
  in.s2 = s2;
  in.beta = beta;
  in.delta = delta;
  in.dist_sq = sq_dist(inst.x_k, inst.x_anchor);
  const double bound = lemma1_bound(in);
  const bool pass = stat.mean <= bound + 3.0 * stat.std_error;
  return {name, pass,
          format("mc=%.4g (se %.2g) bound=%.4g", stat.mean, stat.std_error,
                 bound)};
}

CheckResult check_lemma2(const LemmaInstance& inst, int s1, const char* name) {
  const double delta = 0.001;
  const int s2 = 2;
  const auto stat = mc_svrg_coord_variance(*inst.obj, inst.x_k, inst.x_anchor,
                                           s1, s2, delta, 10000, 905);
  BoundInputs in;
  in.L = inst.L;
  in.sigma2 = inst.sigma2;
  in.d = 3;
  in.n = 6;
  in.s1 = s1;
  in.s2 = s2;
  in.delta = delta;
  in.dist_sq = sq_dist(inst.x_k, inst.x_anchor);
  const double bound = lemma2_bound(in);
  const bool pass = stat.mean <= bound + 3.0 * stat.std_error;
  return {name, pass,
          format("mc=%.4g (se %.2g) bound=%.4g", stat.mean, stat.std_error,
                 bound)};
}

CheckResult check_lemma2_tighter(const LemmaInstance& inst) {
  BoundInputs in;
  in.L = inst.L;
  in.sigma2 = inst.sigma2;
  in.d = 3;
  in.n = 6;
  in.s1 = 6;
  in.s2 = 2;
  in.beta = 0.01;
  in.delta = 0.001;
  in.dist_sq = sq_dist(inst.x_k, inst.x_anchor);
  const double b1 = lemma1_bound(in);
  const double b2 = lemma2_bound(in);
  return {"lemma2-tighter-than-lemma1", b2 < b1,
          format("lemma2=%.4g < lemma1=%.4g", b2, b1)};
}

CheckResult check_lemma3(const LemmaInstance& inst) {
  const double delta = 0.001;
  const int s2 = 2, steps = 3;
  const double L = inst.L;
  const double eta = 1.0 / (4.0 * L);
  const auto result = mc_spider_variance(*inst.obj, inst.x_anchor, 6, s2, steps,
                                         eta, delta, 10000, 907);
  BoundInputs in;
  in.L = L;
  in.sigma2 = inst.sigma2;
  in.d = 3;
  in.n = 6;
  in.s1 = 6;
  in.s2 = s2;
  in.eta = eta;
  in.delta = delta;
  const double bound = lemma3_bound(
      in, result.sum_v_sq.mean + 3.0 * result.sum_v_sq.std_error, steps);
  const bool pass = result.err.mean <= bound + 3.0 * result.err.std_error;
  return {"lemma3-domination", pass,
          format("mc=%.4g (se %.2g) bound=%.4g", result.err.mean,
                 result.err.std_error, bound)};
}

CheckResult check_smoothing_gap_quadratic() {
  const int d = 4;
  auto obj = random_psd_quadratic(d, 41);
  const double L = obj->metadata().smoothness_L.value();
  double trace_a = 0.0;
  {
    // tr(A) = sum of e_j^T A e_j, recovered through the gradient oracle.
    Vec zero(d, 0.0), e(d, 0.0);
    const Vec g0 = analytic_gradient(*obj, zero);
    for (int j = 0; j < d; ++j) {
      e.assign(d, 0.0);
      e[j] = 1.0;
      trace_a += analytic_gradient(*obj, e)[j] - g0[j];
    }
  }
  const double beta = 0.05;
  std::mt19937_64 rng(43);
  const Vec x = random_point(rng, d, 1.0);
  const auto stat = smoothed_value_gap_mc(*obj, x, beta, 200000, 909);
  const double closed_form = beta * beta * trace_a / (2.0 * (d + 2));
  const double cap = smoothing_gaps(L, d, beta).first;
  const bool pass = std::fabs(stat.mean - closed_form) <=
                        4.0 * stat.std_error + 1e-12 &&
                    closed_form <= cap + 1e-12;
  return {"smoothing-gap-quadratic", pass,
          format("mc=%.5g closed=%.5g cap=%.5g", stat.mean, closed_form, cap)};
}

// --- PL checks ---------------------------------------------------------------

std::unique_ptr<DifferentiableObjective> pl_quadratic(int d,
                                                      double condition) {
  // Diagonal spectrum linearly spaced on [1, condition].
  std::vector<Vec> a(d, Vec(d, 0.0));
  for (int j = 0; j < d; ++j) {
    a[j][j] = 1.0 + (condition - 1.0) * static_cast<double>(j) /
                        static_cast<double>(d - 1);
  }
  return make_quadratic(a, Vec(d, 0.0));
}

struct PlRun {
  LineFit fit;
  double final_gap = 0.0;
  double floor = 0.0;
  bool decayed_below_floor = false;
};

PlRun pl_run() {
  const int d = 10;
  auto obj = pl_quadratic(d, 10.0);
  const double L = obj->metadata().smoothness_L.value();
  const double gamma = obj->metadata().pl_gamma.value();
  const double f_star = obj->metadata().optimum_value.value();

  HyperParams hp = select_params(Corollary::kCor3, 1, d, 800, L);
  hp.smoothing.delta = 1e-6;
  hp.smoothing.beta = 1e-6;
  hp.seed = 51;
  RunOptions opts;
  opts.x0 = Vec(d, 1.0);
  const RunTrace trace = run_zo_spider_coord(*obj, hp, opts);

  PlRun out;
  // q = 1 here, so each row is one epoch.
  std::vector<double> ks, logs;
  const int epochs = 20;
  for (int m = 0; m < epochs && m < static_cast<int>(trace.rows.size()); ++m) {
    const double gap = trace.rows[static_cast<std::size_t>(m * hp.q)].f_value - f_star;
    if (gap <= 0) break;
    ks.push_back(static_cast<double>(m));
    logs.push_back(std::log(gap));
  }
  out.fit = fit_line(ks, logs);
  out.final_gap = objective_value(*obj, trace.final_x) - f_star;
  // Order-of-magnitude error floor with the constant ratio taken as 1.
  out.floor = 4.0 * gamma * 2.0 * L * L * d * hp.smoothing.delta *
              hp.smoothing.delta;
  out.decayed_below_floor = out.final_gap <= out.floor;
  return out;
}

CheckResult check_pl_linear() {
  const auto run = pl_run();
  const bool pass = run.fit.slope < 0 && run.fit.r2 > 0.95;
  return {"pl-linear-convergence", pass,
          format("slope=%.4f r2=%.4f (want slope<0, r2>0.95)", run.fit.slope,
                 run.fit.r2)};
}

CheckResult check_pl_final_gap() {
  const auto run = pl_run();
  return {"pl-final-gap", run.final_gap < 1e-8,
          format("final gap=%.3g (tol 1e-8)", run.final_gap)};
}

CheckResult check_pl_floor() {
  const auto run = pl_run();
  return {"pl-error-floor-order", run.decayed_below_floor,
          format("final gap=%.3g <= floor order %.3g", run.final_gap, run.floor)};
}

CheckResult check_gradient_dominance() {
  auto obj = random_psd_quadratic(6, 61, 0.8);
  const double gamma = obj->metadata().pl_gamma.value();
  const double f_star = obj->metadata().optimum_value.value();
  std::mt19937_64 rng(63);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec x = random_point(rng, 6, 3.0);
    const double gap = objective_value(*obj, x) - f_star;
    const double gsq = sq_norm(analytic_gradient(*obj, x));
    if (gap > gamma * gsq * (1.0 + 1e-12) + 1e-12) ++violations;
  }
  return {"pl-gradient-dominance-quadratic", violations == 0,
          format("violations=%d / 1000", violations)};
}

// --- prox checks --------------------------------------------------------------

CheckResult check_prox_values() {
  const Vec a = prox_map(Vec{0.3}, 0.5, Regularizer::Kind::kL1);
  const Vec b = prox_map(Vec{-2.0}, 0.5, Regularizer::Kind::kL1);
  const Vec c = prox_map(Vec{0.3, -2.0}, 0.0, Regularizer::Kind::kL1);
  const bool pass = a[0] == 0.0 && b[0] == -1.5 && c[0] == 0.3 && c[1] == -2.0;
  return {"prox-soft-threshold-values", pass,
          format("prox(0.3;0.5)=%g prox(-2;0.5)=%g", a[0], b[0])};
}

CheckResult check_prox_nonexpansive() {
  std::mt19937_64 rng(71);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec z1 = random_point(rng, 5, 3.0);
    const Vec z2 = random_point(rng, 5, 3.0);
    const Vec p1 = prox_map(z1, 0.4, Regularizer::Kind::kL1);
    const Vec p2 = prox_map(z2, 0.4, Regularizer::Kind::kL1);
    if (sq_dist(p1, p2) > sq_dist(z1, z2) * (1.0 + 1e-12)) ++violations;
  }
  return {"prox-nonexpansive", violations == 0,
          format("violations=%d / 1000", violations)};
}

CheckResult check_prox_zero_equals_spider() {
  auto obj = test_logreg(20, 6, 73);
  HyperParams hp;
  hp.eta = 0.1;
  hp.q = 4;
  hp.K = 40;
  hp.s1 = 20;
  hp.s2 = 3;
  hp.smoothing = {0.01, 0.001};
  hp.seed = 75;
  const auto plain = run_zo_spider_coord(*obj, hp);
  const auto prox = run_prox_zo_spider_coord(*obj, Regularizer::zero(), hp);
  bool same = plain.rows.size() == prox.rows.size() &&
              plain.final_x == prox.final_x && plain.output_x == prox.output_x;
  if (same) {
    for (std::size_t i = 0; i < plain.rows.size(); ++i) {
      const auto& a = plain.rows[i];
      const auto& b = prox.rows[i];
      if (a.k != b.k || a.queries != b.queries || a.f_value != b.f_value ||
          a.grad_norm_sq != b.grad_norm_sq) {
        same = false;
        break;
      }
    }
  }
  return {"prox-zero-equals-spider", same,
          same ? "traces and iterates bit-identical" : "mismatch found"};
}

CheckResult check_prox_l1_decrease() {
  std::mt19937_64 rng(81);
  auto data = make_synthetic_logreg_data(rng, 200, 20, 2.0);
  auto obj = make_nonconvex_logreg(data, 0.1, 20);
  const double L = obj->metadata().smoothness_L.value();
  const Regularizer reg = Regularizer::l1(0.01);

  HyperParams hp = select_params(Corollary::kCor3, 200, 20, 2000, L);
  hp.seed = 83;
  const auto trace = run_prox_zo_spider_coord(*obj, reg, hp);
  const double initial = trace.rows.front().grad_norm_sq;
  const double final_gsq =
      sq_norm(generalized_gradient(*obj, trace.final_x, hp.eta, reg));
  const bool pass = final_gsq <= 0.1 * initial;
  return {"prox-l1-generalized-gradient-decrease", pass,
          format("||G||^2 %.4g -> %.4g (want <= 0.1x)", initial, final_gsq)};
}

CheckResult check_generalized_gradient_zero() {
  auto obj = random_psd_quadratic(4, 91);
  std::mt19937_64 rng(93);
  const Vec x = random_point(rng, 4, 2.0);
  const Vec g = analytic_gradient(*obj, x);
  const Vec gg = generalized_gradient(*obj, x, 0.3, Regularizer::zero());
  return {"generalized-gradient-zero-reg", g == gg,
          g == gg ? "G == grad f exactly" : "mismatch"};
}

CheckResult check_generalized_gradient_l1_oracle() {
  auto obj = random_psd_quadratic(4, 95);
  std::mt19937_64 rng(97);
  const double eta = 0.2, lambda = 0.3;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = random_point(rng, 4, 2.0);
    const Vec g = analytic_gradient(*obj, x);
    const Vec gg = generalized_gradient(*obj, x, eta, Regularizer::l1(lambda));
    // Independent route per coordinate: a value grid over
    // min_z g_j z + (z - x_j)^2 / (2 eta) + lambda |z| brackets the minimizer,
    // then bisection on the (monotone) subgradient pins it to full precision.
    for (int j = 0; j < 4; ++j) {
      auto objective_1d = [&](double z) {
        return g[j] * z + (z - x[j]) * (z - x[j]) / (2.0 * eta) +
               lambda * std::fabs(z);
      };
      // The right derivative is nondecreasing and changes sign exactly at the
      // minimizer of this strictly convex 1-D objective.
      auto right_derivative = [&](double z) {
        return g[j] + (z - x[j]) / eta + (z >= 0 ? lambda : -lambda);
      };
      double best_z = x[j] - 10.0;
      double best_v = objective_1d(best_z);
      for (double z = x[j] - 10.0; z <= x[j] + 10.0; z += 0.01) {
        const double v = objective_1d(z);
        if (v < best_v) {
          best_v = v;
          best_z = z;
        }
      }
      double lo = best_z - 0.02, hi = best_z + 0.02;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (right_derivative(mid) < 0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double z_star = 0.5 * (lo + hi);
      worst = std::max(worst, std::fabs(gg[j] - (x[j] - z_star) / eta));
    }
  }
  return {"generalized-gradient-l1-oracle", worst <= 1e-8,
          format("worst per-coordinate err=%.3g (tol 1e-8)", worst)};
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"estimators", "lemmas", "pl", "prox"};
}

std::vector<CheckResult> run_verify_suite(const std::string& suite) {
  std::vector<CheckResult> results;
  if (suite == "estimators") {
    {
      auto logreg = test_logreg(6, 3, 17);
      results.push_back(check_coord_bias("lemma4-bias-logreg", *logreg, 1.0, 19));
    }
    {
      auto quad = random_psd_quadratic(5, 27);
      results.push_back(
          check_coord_bias("lemma4-bias-quadratic", *quad, 2.0, 29));
    }
    results.push_back(check_coord_exact_quadratic());
    results.push_back(check_sphere_norm());
    results.push_back(check_sphere_sign_frequency());
    results.push_back(check_sphere_second_moment());
    results.push_back(check_two_point_unbiased());
    results.push_back(check_query_accounting());
  } else if (suite == "lemmas") {
    const auto inst = lemma_instance();
    results.push_back(check_lemma1(inst, 6, "lemma1-domination-full"));
    results.push_back(check_lemma1(inst, 3, "lemma1-domination-partial"));
    results.push_back(check_lemma2(inst, 6, "lemma2-domination"));
    results.push_back(check_lemma2_tighter(inst));
    results.push_back(check_lemma3(inst));
    results.push_back(check_smoothing_gap_quadratic());
  } else if (suite == "pl") {
    results.push_back(check_pl_linear());
    results.push_back(check_pl_final_gap());
    results.push_back(check_pl_floor());
    results.push_back(check_gradient_dominance());
  } else if (suite == "prox") {
    results.push_back(check_prox_values());
    results.push_back(check_prox_nonexpansive());
    results.push_back(check_prox_zero_equals_spider());
    results.push_back(check_prox_l1_decrease());
    results.push_back(check_generalized_gradient_zero());
    results.push_back(check_generalized_gradient_l1_oracle());
  } else {
    throw std::invalid_argument("unknown verify suite: " + suite);
  }
  return results;
}

}  // namespace zovr
