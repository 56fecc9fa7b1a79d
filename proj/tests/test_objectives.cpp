#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "zovr/bounds.hpp"
#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"

using namespace zovr;

namespace {

Vec central_difference(const FiniteSumObjective& obj, std::span<const double> x,
                       double h) {
  const int d = obj.dim();
  Vec g(d), shifted(x.begin(), x.end());
  for (int j = 0; j < d; ++j) {
    const double saved = shifted[j];
    shifted[j] = saved + h;
    const double fp = objective_value(obj, shifted);
    shifted[j] = saved - h;
    const double fm = objective_value(obj, shifted);
    shifted[j] = saved;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Vec random_point(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vec x(d);
  for (auto& v : x) v = unif(rng);
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("objectives");

TEST_CASE("logreg value at the origin is ln 2") {
  const std::vector<DatasetRecord> data = {{1, {{1, 1.0}, {2, 0.0}}},
                                           {-1, {{1, -0.3}}}};
  auto obj = make_nonconvex_logreg(data, 0.0, 2);
  const Vec zero(2, 0.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(obj->eval_component(i, zero) == doctest::Approx(std::numbers::ln2));
  }
}

TEST_CASE("logreg component matches an independent scalar evaluation") {
  // Single record (x = (1, 0), y = +1), w = (0, 0): the loss is
  // log(1 + exp(-w.x)) + alpha * sum w^2/(1+w^2), evaluated by hand.
  const std::vector<DatasetRecord> data = {{1, {{1, 1.0}}}};
  auto obj = make_nonconvex_logreg(data, 0.1, 2);
  const Vec w0(2, 0.0);
  const double by_hand = std::log(1.0 + std::exp(-0.0)) + 0.1 * 0.0;
  CHECK(std::fabs(obj->eval_component(0, w0) - by_hand) <= 1e-12);

  const Vec w1 = {0.7, -0.2};
  const double margin = 0.7 * 1.0;
  const double by_hand1 =
      std::log(1.0 + std::exp(-margin)) +
      0.1 * (0.49 / 1.49 + 0.04 / 1.04);
  CHECK(std::fabs(obj->eval_component(0, w1) - by_hand1) <= 1e-12);
}

TEST_CASE("logreg rejects bad input") {
  CHECK_THROWS_AS(make_nonconvex_logreg({}, 0.1), std::invalid_argument);
  const std::vector<DatasetRecord> bad_label = {{2, {{1, 1.0}}}};
  CHECK_THROWS_AS(make_nonconvex_logreg(bad_label, 0.1), std::invalid_argument);
  const std::vector<DatasetRecord> wide = {{1, {{5, 1.0}}}};
  CHECK_THROWS_AS(make_nonconvex_logreg(wide, 0.1, 3), std::invalid_argument);
}

TEST_CASE("regularizer term stays within [0, alpha d]") {
  const double alpha = 0.25;
  const std::vector<DatasetRecord> data = {{1, {{1, 0.5}}}};
  auto with_reg = make_nonconvex_logreg(data, alpha, 4);
  auto without = make_nonconvex_logreg(data, 0.0, 4);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec w = random_point(rng, 4, 50.0);
    const double reg = with_reg->eval_component(0, w) - without->eval_component(0, w);
    CHECK(reg >= -1e-12);
    CHECK(reg <= alpha * 4 + 1e-12);
  }
}

TEST_CASE("quadratic metadata from the identity and diag(1,4)") {
  {
    auto obj = make_quadratic({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    CHECK(obj->metadata().smoothness_L.value() == doctest::Approx(1.0));
    CHECK(obj->metadata().pl_gamma.value() == doctest::Approx(0.5));
    CHECK(obj->metadata().optimum_value.value() == doctest::Approx(0.0));
  }
  {
    auto obj = make_quadratic({{1.0, 0.0}, {0.0, 4.0}}, {0.0, 0.0});
    CHECK(obj->metadata().smoothness_L.value() == doctest::Approx(4.0));
    CHECK(obj->metadata().pl_gamma.value() == doctest::Approx(0.5));
  }
}

TEST_CASE("quadratic eigen metadata agrees with a power-iteration oracle") {
  // Independent oracle: power iteration for lambda_max on A, then on
  // (lambda_max I - A) for lambda_min.
  const int d = 5;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> m(d, Vec(d));
  for (auto& row : m) {
    for (auto& v : row) v = gauss(rng);
  }
  std::vector<Vec> a(d, Vec(d, 0.0));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      double s = 0.0;
      for (int t = 0; t < d; ++t) s += m[t][r] * m[t][c];
      a[r][c] = s / d + (r == c ? 0.2 : 0.0);
    }
  }
  auto matvec = [&](const Vec& v) {
    Vec out(d, 0.0);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) out[r] += a[r][c] * v[c];
    }
    return out;
  };
  auto power_lambda = [&](auto&& apply) {
    Vec v(d, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
      Vec w = apply(v);
      double norm = 0.0;
      for (double value : w) norm += value * value;
      norm = std::sqrt(norm);
      for (auto& value : w) value /= norm;
      lambda = norm;
      v = std::move(w);
    }
    return lambda;
  };
  const double lambda_max = power_lambda(matvec);
  const double lambda_min =
      lambda_max - power_lambda([&](const Vec& v) {
        Vec w = matvec(v);
        for (int j = 0; j < d; ++j) w[j] = lambda_max * v[j] - w[j];
        return w;
      });

  auto obj = make_quadratic(a, Vec(d, 0.0));
  CHECK(obj->metadata().smoothness_L.value() ==
        doctest::Approx(lambda_max).epsilon(1e-8));
  CHECK(obj->metadata().pl_gamma.value() ==
        doctest::Approx(1.0 / (2.0 * lambda_min)).epsilon(1e-6));
}

TEST_CASE("quadratic rejects a non-symmetric matrix") {
  CHECK_THROWS_AS(make_quadratic({{1.0, 2.0}, {0.0, 1.0}}, {0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("analytic gradient of the identity quadratic") {
  auto obj = make_quadratic({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
  const Vec g = analytic_gradient(*obj, Vec{1.0, 2.0});
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(2.0));
}

TEST_CASE("analytic gradient of a constant objective is zero") {
  testing::ConstantObjective obj(3, 4, 2.5);
  const Vec g = analytic_gradient(obj, Vec(4, 0.7));
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("gradient oracle matches central differences on benchmark problems") {
  std::mt19937_64 rng(7);
  auto data = testing::small_logreg_data(12, 5, 31);
  auto logreg = make_nonconvex_logreg(data, 0.1, 5);
  auto quad = make_quadratic({{2.0, 0.3}, {0.3, 1.0}}, {0.1, -0.4});
  const FiniteSumObjective* objs[] = {logreg.get(), quad.get()};
  for (const auto* obj : objs) {
    for (int p = 0; p < 100; ++p) {
      const Vec x = random_point(rng, obj->dim(), 1.5);
      const Vec fd = central_difference(*obj, x, 1e-6);
      const Vec g = analytic_gradient(*obj, x);
      for (int j = 0; j < obj->dim(); ++j) {
        CHECK(std::fabs(fd[j] - g[j]) <= 1e-4);
      }
    }
  }
}

TEST_CASE("logreg at the origin agrees with a delta=1e-6 central difference") {
  auto data = testing::small_logreg_data(10, 4, 41);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  const Vec w0(4, 0.0);
  const Vec fd = central_difference(*obj, w0, 1e-6);
  const Vec g = analytic_gradient(*obj, w0);
  for (int j = 0; j < 4; ++j) CHECK(std::fabs(fd[j] - g[j]) <= 1e-5);
}

TEST_CASE("component gradients respect the smoothness bound") {
  auto data = testing::small_logreg_data(8, 4, 43);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  const double L = obj->metadata().smoothness_L.value();
  std::mt19937_64 rng(45);
  Vec gx(4), gy(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec x = random_point(rng, 4, 2.0);
    Vec y = random_point(rng, 4, 2.0);
    for (int i = 0; i < obj->num_components(); ++i) {
      obj->component_gradient(i, x, gx);
      obj->component_gradient(i, y, gy);
      double diff = 0.0, dist = 0.0;
      for (int j = 0; j < 4; ++j) {
        diff += (gx[j] - gy[j]) * (gx[j] - gy[j]);
        dist += (x[j] - y[j]) * (x[j] - y[j]);
      }
      CHECK(std::sqrt(diff) <= L * std::sqrt(dist) + 1e-9);
    }
  }
}

TEST_CASE("metering counts every call and passes values through") {
  auto data = testing::small_logreg_data(6, 4, 47);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  QueryMeter meter;
  const auto wrapped = metered(*obj, meter);

  CHECK(meter.total() == 0);

  std::mt19937_64 rng(49);
  const Vec x = random_point(rng, 4, 1.0);
  const double direct = obj->eval_component(3, x);
  CHECK(wrapped.eval_component(3, x) == direct);
  CHECK(wrapped.eval_component(3, x) == direct);  // no caching
  CHECK(meter.total() == 2);

  // One full-batch coordinate estimate costs 2 d n evaluations.
  std::vector<int> all = {0, 1, 2, 3, 4, 5};
  meter.reset();
  coord_estimate(wrapped, all, x, 1e-3);
  CHECK(meter.total() == 2 * 4 * 6);
}

TEST_CASE("metered objectives expose no gradient surface") {
  auto data = testing::small_logreg_data(6, 4, 53);
  auto obj = make_nonconvex_logreg(data, 0.1, 4);
  QueryMeter meter;
  const auto wrapped = metered(*obj, meter);
  CHECK_THROWS_AS(analytic_gradient(wrapped, Vec(4, 0.0)), std::runtime_error);
  CHECK(meter.total() == 0);
}

TEST_CASE("phase bookkeeping splits outer and inner counts") {
  testing::ConstantObjective obj(4, 2, 1.0);
  QueryMeter meter;
  const auto wrapped = metered(obj, meter);
  const Vec x(2, 0.0);
  meter.set_phase(QueryPhase::kOuter);
  wrapped.eval_component(0, x);
  meter.set_phase(QueryPhase::kInner);
  wrapped.eval_component(1, x);
  wrapped.eval_component(2, x);
  CHECK(meter.phase_total(QueryPhase::kOuter) == 1);
  CHECK(meter.phase_total(QueryPhase::kInner) == 2);
  CHECK(meter.total() == 3);
}

TEST_CASE("empirical sigma2 is zero for a single-component objective") {
  auto quad = make_quadratic({{1.0, 0.0}, {0.0, 2.0}}, {0.0, 0.0});
  const std::vector<Vec> probes = {{0.0, 0.0}, {1.0, -1.0}};
  CHECK(empirical_sigma2(*quad, probes) == 0.0);
}

TEST_SUITE_END();
