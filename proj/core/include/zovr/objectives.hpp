#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "zovr/data_io.hpp"
#include "zovr/query_meter.hpp"
#include "zovr/trace.hpp"

namespace zovr {

struct ObjectiveMetadata {
  std::optional<double> smoothness_L;    // Lipschitz constant of each component gradient
  std::optional<double> variance_sigma2; // bound on (1/n) sum ||grad f_i - grad f||^2
  std::optional<double> pl_gamma;        // gradient-dominance constant
  std::optional<double> optimum_value;   // f(x*) when analytically known
};

/// Black-box finite-sum objective f(x) = (1/n) sum_i f_i(x).
///
/// This surface is all an optimizer ever sees. eval_component must be
/// deterministic in (i, x). Implementations are immutable after construction
/// and safe to evaluate from multiple threads.
class FiniteSumObjective {
 public:
  virtual ~FiniteSumObjective() = default;

  virtual int num_components() const = 0;  // n
  virtual int dim() const = 0;             // d
  virtual double eval_component(int i, std::span<const double> x) const = 0;

  virtual const ObjectiveMetadata& metadata() const { return meta_; }

 protected:
  ObjectiveMetadata meta_;
};

/// Objectives that additionally expose exact component gradients. The
/// gradient surface exists for reporting and tests only; optimizer update
/// paths must not touch it, and it never moves a QueryMeter.
class DifferentiableObjective : public FiniteSumObjective {
 public:
  virtual void component_gradient(int i, std::span<const double> x,
                                  std::span<double> out) const = 0;
};

/// Mean of the n component values.
double objective_value(const FiniteSumObjective& obj, std::span<const double> x);

/// Mean of the component gradients, exact. Throws std::runtime_error when the
/// objective carries no gradient implementation.
Vec analytic_gradient(const FiniteSumObjective& obj, std::span<const double> x);

/// Metered pass-through view of an objective. Every eval_component adds one
/// to the attached meter; values are forwarded bit-identically. Deliberately
/// not a DifferentiableObjective, so nothing reached through a metered handle
/// can leak gradient information.
class MeteredObjective final : public FiniteSumObjective {
 public:
  MeteredObjective(const FiniteSumObjective& base, QueryMeter& meter)
      : base_(&base), meter_(&meter) {}

  int num_components() const override { return base_->num_components(); }
  int dim() const override { return base_->dim(); }
  double eval_component(int i, std::span<const double> x) const override {
    meter_->record(1);
    return base_->eval_component(i, x);
  }
  const ObjectiveMetadata& metadata() const override { return base_->metadata(); }

 private:
  const FiniteSumObjective* base_;
  QueryMeter* meter_;
};

inline MeteredObjective metered(const FiniteSumObjective& obj, QueryMeter& meter) {
  return MeteredObjective(obj, meter);
}

/// Two-class logistic loss with a bounded nonconvex regularizer:
///   f_i(w) = log(1 + exp(-y_i w^T x_i)) + alpha * sum_j w_j^2 / (1 + w_j^2).
///
/// dim = 0 infers the dimension as the max feature index. metadata.smoothness_L
/// is the upper bound max_i ||x_i||^2 / 4 + 2 alpha.
/// Throws std::invalid_argument on an empty dataset, a label outside {-1,+1},
/// or a feature index above an explicitly requested dimension.
std::unique_ptr<DifferentiableObjective> make_nonconvex_logreg(
    const std::vector<DatasetRecord>& data, double alpha, int dim = 0);

/// Single-component quadratic f(x) = x^T A x / 2 - b^T x for symmetric PSD A
/// (rows of equal length d). metadata carries L = lambda_max and, when A is
/// positive definite, pl_gamma = 1 / (2 lambda_min) and the optimal value.
/// Throws std::invalid_argument when A is not symmetric or not PSD.
std::unique_ptr<DifferentiableObjective> make_quadratic(
    const std::vector<Vec>& a_matrix, const Vec& b);

}  // namespace zovr
