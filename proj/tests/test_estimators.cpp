#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"

using namespace zovr;

namespace {

std::vector<int> all_indices(int n) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("coordinate estimator is zero on a constant objective") {
  testing::ConstantObjective obj(3, 4, 7.25);
  const auto est = coord_estimate(obj, all_indices(3), Vec(4, 0.3), 1e-3);
  for (double v : est.vector) CHECK(v == 0.0);
  CHECK(est.queries_used == 2 * 4 * 3);
}

TEST_CASE("coordinate estimator is exact on 0.5 ||x||^2") {
  auto obj = make_quadratic({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
  const auto est = coord_estimate(*obj, all_indices(1), Vec{1.0, 2.0}, 0.1);
  CHECK(est.vector[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.vector[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("coordinate estimator bias obeys L^2 d delta^2 on logreg") {
  auto data = testing::small_logreg_data(1, 4, 61);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  const double L = obj->metadata().smoothness_L.value();
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double delta = 1e-3;
  const double bound = L * L * 4 * delta * delta;
  for (int trial = 0; trial < 50; ++trial) {
    Vec x(4);
    for (auto& v : x) v = unif(rng);
    const auto est = coord_estimate(*obj, all_indices(1), x, delta);
    const Vec grad = analytic_gradient(*obj, x);
    CHECK(sq_dist(est.vector, grad) <= bound);
  }
}

TEST_CASE("coordinate estimator rejects bad arguments") {
  testing::ConstantObjective obj(3, 2, 0.0);
  CHECK_THROWS_AS(coord_estimate(obj, all_indices(3), Vec(2, 0.0), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(coord_estimate(obj, all_indices(3), Vec(2, 0.0), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(coord_estimate(obj, std::vector<int>{}, Vec(2, 0.0), 1e-3),
                  std::invalid_argument);
}

TEST_CASE("two-point estimator is zero on a constant objective") {
  testing::ConstantObjective obj(2, 3, -4.0);
  std::mt19937_64 rng(65);
  const Vec u = sample_unit_sphere(rng, 3);
  const auto est = rand_two_point_estimate(obj, 1, Vec(3, 0.1), u, 1e-2);
  for (double v : est.vector) CHECK(v == 0.0);
  CHECK(est.queries_used == 2);
}

TEST_CASE("two-point estimator recovers a linear slope exactly in d=1") {
  testing::LinearObjective obj(Vec{3.5});
  const Vec u = {1.0};
  const auto est = rand_two_point_estimate(obj, 0, Vec{0.2}, u, 0.05);
  CHECK(est.vector[0] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("two-point estimator validates the direction and beta") {
  testing::ConstantObjective obj(2, 3, 0.0);
  CHECK_THROWS_AS(
      rand_two_point_estimate(obj, 0, Vec(3, 0.0), Vec{1.0, 1.0, 0.0}, 1e-2),
      std::invalid_argument);
  CHECK_THROWS_AS(
      rand_two_point_estimate(obj, 0, Vec(3, 0.0), Vec{1.0, 0.0, 0.0}, 0.0),
      std::invalid_argument);
}

TEST_CASE("two-point Monte-Carlo mean matches the gradient on a quadratic") {
  // On quadratics the smoothed gradient equals the gradient, so the
  // estimator's mean over fresh directions must land on grad f within
  // sampling error.
  auto obj = make_quadratic({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
                            {0.0, 0.0, 0.0});
  const Vec x = {0.8, -0.4, 1.2};
  const Vec grad = analytic_gradient(*obj, x);
  const int draws = 100000;
  std::mt19937_64 rng(67);
  Vec sum(3, 0.0), sum_sq(3, 0.0);
  for (int i = 0; i < draws; ++i) {
    const Vec u = sample_unit_sphere(rng, 3);
    const auto est = rand_two_point_estimate(*obj, 0, x, u, 1e-5);
    for (int j = 0; j < 3; ++j) {
      sum[j] += est.vector[j];
      sum_sq[j] += est.vector[j] * est.vector[j];
    }
  }
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / draws;
    const double var = std::max(0.0, sum_sq[j] / draws - mean * mean);
    const double se = std::sqrt(var / draws);
    CHECK(std::fabs(mean - grad[j]) <= 3.0 * se);
  }
}

TEST_CASE("sphere samples are unit length; d=1 signs are balanced") {
  std::mt19937_64 rng(69);
  for (int d : {1, 3, 17}) {
    for (int i = 0; i < 300; ++i) {
      const Vec u = sample_unit_sphere(rng, d);
      double norm_sq = 0.0;
      for (double v : u) norm_sq += v * v;
      CHECK(std::fabs(std::sqrt(norm_sq) - 1.0) <= 1e-12);
    }
  }
  int positives = 0;
  for (int i = 0; i < 10000; ++i) {
    positives += sample_unit_sphere(rng, 1)[0] > 0 ? 1 : 0;
  }
  const double freq = positives / 10000.0;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("mixed inner estimator returns the anchor exactly when x_k == anchor") {
  auto data = testing::small_logreg_data(5, 3, 71);
  auto obj = make_nonconvex_logreg(data, 0.1, 3);
  std::mt19937_64 rng(73);
  const Vec x = {0.2, -0.1, 0.4};
  const Vec anchor_grad = {1.5, -2.0, 0.25};
  const std::vector<int> batch = {0, 2, 4};
  std::vector<Vec> us;
  for (int j = 0; j < 3; ++j) us.push_back(sample_unit_sphere(rng, 3));
  const auto est = svrg_rand_inner(*obj, batch, us, x, x, anchor_grad, 1e-2);
  CHECK(est.vector == anchor_grad);
  CHECK(est.queries_used == 4 * 3);
}

TEST_CASE("mixed inner estimator returns the anchor on a constant objective") {
  testing::ConstantObjective obj(4, 2, 3.0);
  std::mt19937_64 rng(75);
  const std::vector<int> batch = {1, 3};
  std::vector<Vec> us = {sample_unit_sphere(rng, 2), sample_unit_sphere(rng, 2)};
  const Vec anchor_grad = {0.5, -0.5};
  const auto est = svrg_rand_inner(obj, batch, us, Vec{1.0, 1.0}, Vec{2.0, -1.0},
                                   anchor_grad, 1e-2);
  CHECK(est.vector == anchor_grad);
}

TEST_CASE("mixed inner estimator rejects mismatched batch/direction lengths") {
  testing::ConstantObjective obj(4, 2, 0.0);
  std::mt19937_64 rng(77);
  const std::vector<int> batch = {0, 1};
  std::vector<Vec> us = {sample_unit_sphere(rng, 2)};
  CHECK_THROWS_AS(svrg_rand_inner(obj, batch, us, Vec(2, 0.0), Vec(2, 0.0),
                                  Vec(2, 0.0), 1e-2),
                  std::invalid_argument);
}

TEST_CASE("mixed inner estimator averages to the full-batch difference form") {
  // n = 3, single-sample batch, one fixed direction: averaging the estimate
  // over all three equally likely sample choices must equal the same
  // expression evaluated through f = mean of components.
  auto data = testing::small_logreg_data(3, 2, 79);
  auto obj = make_nonconvex_logreg(data, 0.1, 2);
  std::mt19937_64 rng(81);
  const Vec u = sample_unit_sphere(rng, 2);
  const Vec x_k = {0.3, -0.2};
  const Vec x_anchor = {-0.1, 0.25};
  const Vec anchor_grad = {0.4, 0.9};
  const double beta = 1e-3;

  Vec mean(2, 0.0);
  for (int a = 0; a < 3; ++a) {
    const int batch[] = {a};
    const std::vector<Vec> us = {u};
    const auto est =
        svrg_rand_inner(*obj, batch, us, x_k, x_anchor, anchor_grad, beta);
    for (int j = 0; j < 2; ++j) mean[j] += est.vector[j] / 3.0;
  }

  // Same construction through f_S with S = [n]: the mean over component
  // choices of the two-point difference equals the two-point difference of
  // the full objective.
  auto full_two_point = [&](const Vec& at) {
    Vec shifted(2);
    for (int j = 0; j < 2; ++j) shifted[j] = at[j] + beta * u[j];
    const double diff =
        objective_value(*obj, shifted) - objective_value(*obj, at);
    Vec out(2);
    for (int j = 0; j < 2; ++j) out[j] = 2.0 * diff / beta * u[j];
    return out;
  };
  const Vec at_k = full_two_point(x_k);
  const Vec at_anchor = full_two_point(x_anchor);
  for (int j = 0; j < 2; ++j) {
    const double expected = at_k[j] - at_anchor[j] + anchor_grad[j];
    CHECK(std::fabs(mean[j] - expected) <= 1e-10);
  }
}

TEST_CASE("coordinate inner estimator cancels exactly at the anchor") {
  auto data = testing::small_logreg_data(5, 3, 83);
  auto obj = make_nonconvex_logreg(data, 0.1, 3);
  const Vec x = {0.2, -0.1, 0.4};
  const Vec anchor_grad = {1.0, 2.0, 3.0};
  const std::vector<int> batch = {1, 4};
  const auto est = svrg_coord_inner(*obj, batch, x, x, anchor_grad, 1e-3);
  CHECK(est.vector == anchor_grad);
  CHECK(est.queries_used == 4 * 3 * 2);
}

TEST_CASE("coordinate inner estimator is exact on sum quadratics") {
  testing::SumQuadratic obj(6, 4, 85);
  std::mt19937_64 rng(87);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec x_k(4), x_anchor(4), anchor_grad(4);
  for (auto& v : x_k) v = unif(rng);
  for (auto& v : x_anchor) v = unif(rng);
  for (auto& v : anchor_grad) v = unif(rng);
  const std::vector<int> batch = {0, 2, 5};

  const auto est = svrg_coord_inner(obj, batch, x_k, x_anchor, anchor_grad, 0.01);
  const Vec g_k = testing::batch_mean_gradient(obj, batch, x_k);
  const Vec g_anchor = testing::batch_mean_gradient(obj, batch, x_anchor);
  for (int j = 0; j < 4; ++j) {
    const double expected = g_k[j] - g_anchor[j] + anchor_grad[j];
    CHECK(std::fabs(est.vector[j] - expected) <= 1e-10);
  }
}

TEST_CASE("recursive estimator returns v_prev exactly when x_k == x_prev") {
  auto data = testing::small_logreg_data(4, 3, 89);
  auto obj = make_nonconvex_logreg(data, 0.1, 3);
  const Vec x = {0.1, 0.2, -0.3};
  const Vec v_prev = {4.0, -5.0, 6.0};
  const std::vector<int> batch = {0, 3};
  const auto est = spider_coord_step(*obj, batch, x, x, v_prev, 1e-3);
  CHECK(est.vector == v_prev);
  CHECK(est.queries_used == 4 * 3 * 2);
}

TEST_CASE("recursive estimator is exact on sum quadratics") {
  testing::SumQuadratic obj(5, 3, 91);
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec x_k(3), x_prev(3), v_prev(3);
  for (auto& v : x_k) v = unif(rng);
  for (auto& v : x_prev) v = unif(rng);
  for (auto& v : v_prev) v = unif(rng);
  const std::vector<int> batch = {1, 4};
  const auto est = spider_coord_step(obj, batch, x_k, x_prev, v_prev, 0.05);
  const Vec g_k = testing::batch_mean_gradient(obj, batch, x_k);
  const Vec g_prev = testing::batch_mean_gradient(obj, batch, x_prev);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(est.vector[j] - (g_k[j] - g_prev[j] + v_prev[j])) <= 1e-10);
  }
}

TEST_CASE("recursive estimator has the martingale property by enumeration") {
  // n = 3, |S2| = 1: the conditional mean over the three equally likely
  // samples equals the full-batch coordinate difference plus v_prev.
  auto data = testing::small_logreg_data(3, 2, 95);
  auto obj = make_nonconvex_logreg(data, 0.1, 2);
  const Vec x_k = {0.4, -0.2};
  const Vec x_prev = {0.1, 0.3};
  const Vec v_prev = {-0.7, 0.9};
  const double delta = 1e-3;

  Vec mean(2, 0.0);
  for (int a = 0; a < 3; ++a) {
    const int batch[] = {a};
    const auto est = spider_coord_step(*obj, batch, x_k, x_prev, v_prev, delta);
    for (int j = 0; j < 2; ++j) mean[j] += est.vector[j] / 3.0;
  }
  const std::vector<int> all = {0, 1, 2};
  const Vec full_k = coord_estimate(*obj, all, x_k, delta).vector;
  const Vec full_prev = coord_estimate(*obj, all, x_prev, delta).vector;
  for (int j = 0; j < 2; ++j) {
    CHECK(std::fabs(mean[j] - (full_k[j] - full_prev[j] + v_prev[j])) <= 1e-10);
  }
}

TEST_CASE("full outer batch has zero sampling variance") {
  auto data = testing::small_logreg_data(6, 3, 97);
  auto obj = make_nonconvex_logreg(data, 0.1, 3);
  const Vec x = {0.3, 0.1, -0.2};
  const auto a = coord_estimate(*obj, all_indices(6), x, 1e-3);
  const auto b = coord_estimate(*obj, all_indices(6), x, 1e-3);
  CHECK(a.vector == b.vector);
}

TEST_CASE("queries_used equals the meter delta for every estimator") {
  auto data = testing::small_logreg_data(6, 4, 99);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  QueryMeter meter;
  const auto wrapped = metered(*obj, meter);
  std::mt19937_64 rng(101);
  const Vec x(4, 0.2), y(4, -0.1), v0(4, 1.0);
  const std::vector<int> batch = {0, 2, 5};
  std::vector<Vec> us;
  for (int j = 0; j < 3; ++j) us.push_back(sample_unit_sphere(rng, 4));

  std::int64_t before = meter.total();
  auto est = coord_estimate(wrapped, batch, x, 1e-3);
  CHECK(est.queries_used == meter.total() - before);

  before = meter.total();
  est = rand_two_point_estimate(wrapped, 1, x, us[0], 1e-2);
  CHECK(est.queries_used == meter.total() - before);

  before = meter.total();
  est = svrg_rand_inner(wrapped, batch, us, x, y, v0, 1e-2);
  CHECK(est.queries_used == meter.total() - before);

  before = meter.total();
  est = svrg_coord_inner(wrapped, batch, x, y, v0, 1e-3);
  CHECK(est.queries_used == meter.total() - before);

  before = meter.total();
  est = spider_coord_step(wrapped, batch, x, y, v0, 1e-3);
  CHECK(est.queries_used == meter.total() - before);
}

TEST_CASE("smoothing steps are clamped to the floating-point floor") {
  reset_smoothing_clamp_events();
  testing::ConstantObjective obj(1, 2, 0.0);
  const Vec x = {1.0, -2.0};
  const double floor = smoothing_floor(x);
  CHECK(floor == doctest::Approx(1e3 * 2.22e-16 * 3.0).epsilon(1e-2));
  CHECK(clamp_smoothing(1e-300, x) == floor);
  CHECK(smoothing_clamp_events() == 1);
  CHECK(clamp_smoothing(0.5, x) == 0.5);
  CHECK(smoothing_clamp_events() == 1);
  // An estimator call with a sub-floor step still succeeds and records it.
  coord_estimate(obj, std::vector<int>{0}, x, 1e-200);
  CHECK(smoothing_clamp_events() == 2);
  reset_smoothing_clamp_events();
}

TEST_SUITE_END();
