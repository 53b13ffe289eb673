// Copyright 2026 The guided-es Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/problems.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace ges {

namespace {

void check_dim(const Vector& x, Eigen::Index expected, const char* what) {
  if (x.size() != expected) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " has dimension " +
                    std::to_string(x.size()) + ", expected " +
                    std::to_string(expected));
  }
}

}  // namespace

QuadraticProblem::QuadraticProblem(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::invalid_argument,
                "quadratic problem needs positive dimensions");
  }
  RandomStream construction(seed, StreamId{StreamPurpose::construction, 0, 0});
  design_ = Matrix(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      design_(i, j) = construction.normal();
    }
  }
  target_ = construction.normal_vector(rows);
  bias_dir_ = construction.unit_vector(cols);

  gram_.noalias() = design_.transpose() * design_;
  atb_.noalias() = design_.transpose() * target_;
  btb_ = target_.squaredNorm();
  inv_rows_ = 1.0 / static_cast<double>(rows);

  solution_ = gram_.ldlt().solve(atb_);
  optimum_ = loss(solution_);
}

double QuadraticProblem::loss(const Vector& x) const {
  check_dim(x, gram_.rows(), "point");
  return 0.5 * inv_rows_ * (x.dot(gram_ * x) - 2.0 * atb_.dot(x) + btb_);
}

Vector QuadraticProblem::true_gradient(const Vector& x) const {
  check_dim(x, gram_.rows(), "point");
  return inv_rows_ * (gram_ * x - atb_);
}

std::pair<double, Vector> QuadraticProblem::loss_and_gradient(
    const Vector& x) const {
  check_dim(x, gram_.rows(), "point");
  const Vector gx = gram_ * x;
  const double value = 0.5 * inv_rows_ * (x.dot(gx) - 2.0 * atb_.dot(x) + btb_);
  return {value, inv_rows_ * (gx - atb_)};
}

Vector QuadraticProblem::surrogate_from(const Vector& true_grad,
                                        RandomStream& noise) const {
  check_dim(true_grad, gram_.rows(), "gradient");
  const double norm = true_grad.norm();
  const Vector noise_dir = noise.unit_vector(true_grad.size());
  return true_grad + (bias_dir_ + noise_dir) * norm;
}

Vector QuadraticProblem::surrogate_gradient(const Vector& x,
                                            RandomStream& noise) const {
  return surrogate_from(true_gradient(x), noise);
}

UnrolledProblem::UnrolledProblem(std::uint64_t seed)
    : UnrolledProblem(
          [seed] {
            RandomStream construction(
                seed, StreamId{StreamPurpose::construction, 1, 0});
            Matrix design(kRows, kCols);
            for (Eigen::Index j = 0; j < kCols; ++j) {
              for (Eigen::Index i = 0; i < kRows; ++i) {
                design(i, j) = construction.normal();
              }
            }
            return design;
          }(),
          [seed] {
            RandomStream construction(
                seed, StreamId{StreamPurpose::construction, 1, 1});
            return construction.normal_vector(kRows);
          }(),
          seed) {}

UnrolledProblem::UnrolledProblem(const Matrix& design, const Vector& target,
                                 std::uint64_t seed) {
  if (design.rows() != target.size() || design.rows() < 1 ||
      design.cols() < 1) {
    throw Error(ErrorCode::dimension_mismatch,
                "design and target dimensions do not agree");
  }
  rows_ = static_cast<int>(design.rows());
  gram_.noalias() = design.transpose() * design;
  atb_.noalias() = design.transpose() * target;
  btb_ = target.squaredNorm();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_);
  eigenvalues_ = eig.eigenvalues();  // ascending
  optimal_lr_ = 2.0 * rows_ /
                (eigenvalues_[0] + eigenvalues_[eigenvalues_.size() - 1]);

  RandomStream init(seed, StreamId{StreamPurpose::model_init, 1, 0});
  controller_ = MlpModel::create(
      {static_cast<int>(design.cols()), 32, 32, 32, 1}, init);
  initial_params_ = controller_.flatten_params();
}

double UnrolledProblem::inner_loss(const Vector& x) const {
  return 0.5 / rows_ * (x.dot(gram_ * x) - 2.0 * atb_.dot(x) + btb_);
}

Vector UnrolledProblem::inner_gradient(const Vector& x) const {
  return (gram_ * x - atb_) / static_cast<double>(rows_);
}

double UnrolledProblem::predicted_lr(const Vector& controller_params) const {
  MlpModel controller = controller_;
  controller.set_params(controller_params);
  return softplus(controller.forward(eigenvalues_)[0]);
}

double UnrolledProblem::meta_loss_at_lr(double lr, int horizon) const {
  if (horizon < 1) {
    throw Error(ErrorCode::invalid_argument, "horizon must be at least 1");
  }
  if (!std::isfinite(lr)) return lr;
  Vector x = Vector::Zero(gram_.rows());
  for (int t = 0; t < horizon; ++t) {
    x -= lr * inner_gradient(x);
    if (!x.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  }
  return inner_loss(x);
}

double UnrolledProblem::meta_loss(const Vector& controller_params,
                                  int horizon) const {
  if (!controller_params.allFinite()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return meta_loss_at_lr(predicted_lr(controller_params), horizon);
}

Vector UnrolledProblem::surrogate_gradient(
    const Vector& controller_params) const {
  MlpModel controller = controller_;
  controller.set_params(controller_params);
  MlpModel::Trace trace;
  const double raw = controller.forward(eigenvalues_, &trace)[0];
  const double lr = softplus(raw);

  // One unrolled step: L(lr) = f(x0 - lr * g0) with g0 the inner gradient at
  // x0, so dL/dlr = -g0 . grad f(x0 - lr * g0).
  const Vector x0 = Vector::Zero(gram_.rows());
  const Vector g0 = inner_gradient(x0);
  const Vector x1 = x0 - lr * g0;
  const double dloss_dlr = -g0.dot(inner_gradient(x1));

  const double dloss_draw = dloss_dlr * softplus_derivative(raw);
  const MlpModel::Gradients grads =
      controller.backward(trace, Vector::Constant(1, dloss_draw));
  return grads.params;
}

SyntheticGradProblem::SyntheticGradProblem(int dim, std::uint64_t seed)
    : model_optimizer_(OptimizerState::adam(1e-4)) {
  if (dim < 1) {
    throw Error(ErrorCode::invalid_argument, "dimension must be positive");
  }
  RandomStream construction(seed, StreamId{StreamPurpose::construction, 2, 0});
  target_ = Vector(dim);
  for (int i = 0; i < dim; ++i) target_[i] = construction.uniform(-1.0, 1.0);

  RandomStream init(seed, StreamId{StreamPurpose::model_init, 2, 0});
  model_ = MlpModel::create({dim, 64, 64, 1}, init);
}

Vector SyntheticGradProblem::surrogate_gradient(const Vector& x) const {
  check_dim(x, target_.size(), "point");
  MlpModel::Trace trace;
  model_.forward(x, &trace);
  return model_.backward(trace, Vector::Ones(1)).input;
}

double SyntheticGradProblem::model_value(const Vector& x) const {
  check_dim(x, target_.size(), "point");
  return model_.forward(x)[0];
}

void SyntheticGradProblem::observe(const Vector& x, double value) {
  check_dim(x, target_.size(), "observation");
  buffer_.emplace_back(x, value);
  if (static_cast<int>(buffer_.size()) > kBufferCapacity) buffer_.pop_front();
}

void SyntheticGradProblem::model_update(RandomStream& batch_stream) {
  if (buffer_.empty()) return;

  // Mean squared error over the batch; gradients accumulate across samples.
  Vector param_grad = Vector::Zero(model_.param_count());
  MlpModel::Trace trace;
  for (int b = 0; b < kBatchSize; ++b) {
    const auto& [x, value] =
        buffer_[batch_stream.uniform_index(buffer_.size())];
    const double predicted = model_.forward(x, &trace)[0];
    const double dloss = 2.0 * (predicted - value) / kBatchSize;
    param_grad += model_.backward(trace, Vector::Constant(1, dloss)).params;
  }
  model_.set_params(step(model_optimizer_, model_.flatten_params(), param_grad));
}

double SyntheticGradProblem::model_mse(RandomStream& batch_stream,
                                       int batch_size) const {
  if (buffer_.empty() || batch_size < 1) return 0.0;
  double total = 0.0;
  for (int b = 0; b < batch_size; ++b) {
    const auto& [x, value] =
        buffer_[batch_stream.uniform_index(buffer_.size())];
    const double err = model_.forward(x)[0] - value;
    total += err * err;
  }
  return total / batch_size;
}

}  // namespace ges
