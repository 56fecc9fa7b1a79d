#include "zovr/objectives.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zovr {

double objective_value(const FiniteSumObjective& obj, std::span<const double> x) {
  const int n = obj.num_components();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += obj.eval_component(i, x);
  return sum / static_cast<double>(n);
}

Vec analytic_gradient(const FiniteSumObjective& obj, std::span<const double> x) {
  const auto* diff = dynamic_cast<const DifferentiableObjective*>(&obj);
  if (diff == nullptr) {
    throw std::runtime_error("objective has no analytic gradient");
  }
  const int n = obj.num_components();
  const int d = obj.dim();
  Vec grad(d, 0.0), g_i(d, 0.0);
  for (int i = 0; i < n; ++i) {
    diff->component_gradient(i, x, g_i);
    for (int j = 0; j < d; ++j) grad[j] += g_i[j];
  }
  for (int j = 0; j < d; ++j) grad[j] /= static_cast<double>(n);
  return grad;
}

namespace {

class NonconvexLogReg final : public DifferentiableObjective {
 public:
  NonconvexLogReg(const std::vector<DatasetRecord>& data, double alpha, int dim)
      : alpha_(alpha) {
    if (data.empty()) throw std::invalid_argument("empty dataset");
    if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
    int max_index = 0;
    for (const auto& rec : data) {
      if (rec.label != 1 && rec.label != -1) {
        throw std::invalid_argument("labels must be in {-1, +1}");
      }
      if (!rec.features.empty()) {
        max_index = std::max(max_index, rec.features.back().first);
      }
    }
    if (dim == 0) dim = max_index;
    if (dim < max_index || dim < 1) {
      throw std::invalid_argument("feature dimension mismatch");
    }
    dim_ = dim;
    data_ = data;

    double max_norm_sq = 0.0;
    for (const auto& rec : data_) {
      double norm_sq = 0.0;
      for (const auto& [index, value] : rec.features) norm_sq += value * value;
      max_norm_sq = std::max(max_norm_sq, norm_sq);
    }
    // Upper bound: logistic curvature <= ||x_i||^2 / 4, regularizer curvature
    // <= 2 alpha per coordinate.
    meta_.smoothness_L = 0.25 * max_norm_sq + 2.0 * alpha_;
  }

  int num_components() const override { return static_cast<int>(data_.size()); }
  int dim() const override { return dim_; }

  double eval_component(int i, std::span<const double> x) const override {
    const auto& rec = data_[static_cast<std::size_t>(i)];
    double margin = 0.0;
    for (const auto& [index, value] : rec.features) margin += x[index - 1] * value;
    const double z = -static_cast<double>(rec.label) * margin;
    // log(1 + exp(z)) without overflow.
    const double loss = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    double reg = 0.0;
    for (int j = 0; j < dim_; ++j) {
      const double w2 = x[j] * x[j];
      reg += w2 / (1.0 + w2);
    }
    return loss + alpha_ * reg;
  }

  void component_gradient(int i, std::span<const double> x,
                          std::span<double> out) const override {
    const auto& rec = data_[static_cast<std::size_t>(i)];
    double margin = 0.0;
    for (const auto& [index, value] : rec.features) margin += x[index - 1] * value;
    const double y = static_cast<double>(rec.label);
    // d/dw log(1 + exp(-y w.x)) = -y sigmoid(-y w.x) x
    const double coeff = -y / (1.0 + std::exp(y * margin));
    for (int j = 0; j < dim_; ++j) {
      const double denom = 1.0 + x[j] * x[j];
      out[j] = alpha_ * 2.0 * x[j] / (denom * denom);
    }
    for (const auto& [index, value] : rec.features) out[index - 1] += coeff * value;
  }

 private:
  std::vector<DatasetRecord> data_;
  double alpha_;
  int dim_ = 0;
};

class Quadratic final : public DifferentiableObjective {
 public:
  Quadratic(const std::vector<Vec>& a_matrix, const Vec& b) {
    const int d = static_cast<int>(b.size());
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (static_cast<int>(a_matrix.size()) != d) {
      throw std::invalid_argument("A must be d x d");
    }
    a_.resize(d, d);
    for (int r = 0; r < d; ++r) {
      if (static_cast<int>(a_matrix[r].size()) != d) {
        throw std::invalid_argument("A must be d x d");
      }
      for (int c = 0; c < d; ++c) a_(r, c) = a_matrix[r][c];
    }
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if (!a_.isApprox(a_.transpose(), 1e-12)) {
      throw std::invalid_argument("A must be symmetric");
    }
    b_ = Eigen::Map<const Eigen::VectorXd>(b.data(), d);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_);
    const double lambda_min = eig.eigenvalues().minCoeff();
    const double lambda_max = eig.eigenvalues().maxCoeff();
    if (lambda_min < -1e-10 * scale) {
      throw std::invalid_argument("A must be positive semidefinite");
    }
    meta_.smoothness_L = lambda_max;
    meta_.variance_sigma2 = 0.0;  // single component
    if (lambda_min > 1e-12 * scale) {
      meta_.pl_gamma = 1.0 / (2.0 * lambda_min);
      const Eigen::VectorXd x_star = a_.ldlt().solve(b_);
      meta_.optimum_value = -0.5 * b_.dot(x_star);
    }
  }

  int num_components() const override { return 1; }
  int dim() const override { return static_cast<int>(b_.size()); }

  double eval_component(int, std::span<const double> x) const override {
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                               static_cast<Eigen::Index>(x.size()));
    return 0.5 * xv.dot(a_ * xv) - b_.dot(xv);
  }

  void component_gradient(int, std::span<const double> x,
                          std::span<double> out) const override {
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                               static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
    ov = a_ * xv - b_;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

}  // namespace

std::unique_ptr<DifferentiableObjective> make_nonconvex_logreg(
    const std::vector<DatasetRecord>& data, double alpha, int dim) {
  return std::make_unique<NonconvexLogReg>(data, alpha, dim);
}

std::unique_ptr<DifferentiableObjective> make_quadratic(
    const std::vector<Vec>& a_matrix, const Vec& b) {
  return std::make_unique<Quadratic>(a_matrix, b);
}

}  // namespace zovr
