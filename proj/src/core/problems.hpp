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

#pragma once

#include <cstdint>
#include <deque>
#include <utility>

#include "core/mlp.hpp"
#include "core/optimizer.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace ges {

/// Linear regression f(x) = |Ax - b|^2 / (2M) with a controllable surrogate
/// gradient: the true gradient plus a fixed unit bias direction and a fresh
/// unit noise direction, each scaled by the gradient norm. A and b have IID
/// standard normal entries drawn from the construction seed; the same seed
/// reproduces the instance bitwise.
class QuadraticProblem {
 public:
  QuadraticProblem(int rows, int cols, std::uint64_t seed);

  int dim() const { return static_cast<int>(gram_.rows()); }
  double optimum() const { return optimum_; }  // min_x f(x)

  double loss(const Vector& x) const;
  Vector true_gradient(const Vector& x) const;
  std::pair<double, Vector> loss_and_gradient(const Vector& x) const;

  /// surrogate = grad + (bias_dir + fresh unit noise) * |grad|. The noise
  /// stream should be keyed per iteration.
  Vector surrogate_gradient(const Vector& x, RandomStream& noise) const;
  Vector surrogate_from(const Vector& true_grad, RandomStream& noise) const;

  const Matrix& design() const { return design_; }
  const Vector& target() const { return target_; }
  const Vector& bias_direction() const { return bias_dir_; }
  const Vector& solution() const { return solution_; }

 private:
  Matrix design_;   // M x N
  Vector target_;   // M
  Vector bias_dir_; // fixed unit vector, drawn once
  // Cached factors: loss and gradient are evaluated through A^T A and A^T b,
  // which halves the memory traffic of the hot path.
  Matrix gram_;     // A^T A
  Vector atb_;      // A^T b
  double btb_ = 0.0;
  double inv_rows_ = 0.0;  // 1/M
  Vector solution_;        // least-squares minimizer
  double optimum_ = 0.0;
};

/// Meta-optimization target: the loss of a small quadratic after T inner
/// gradient-descent steps, where the learning rate is predicted by an MLP
/// (three 32-unit ReLU layers, softplus output) from the ascending
/// eigenvalues of the inner Hessian. The full-horizon loss (T = 15) is the
/// objective; backprop through a single unrolled step (T = 1) provides the
/// biased surrogate gradient.
class UnrolledProblem {
 public:
  static constexpr int kRows = 20;          // M
  static constexpr int kCols = 10;          // N
  static constexpr int kFullHorizon = 15;
  static constexpr int kTruncatedHorizon = 1;

  explicit UnrolledProblem(std::uint64_t seed);

  /// Same machinery on a caller-supplied inner problem.
  UnrolledProblem(const Matrix& design, const Vector& target,
                  std::uint64_t seed);

  int param_dim() const { return static_cast<int>(initial_params_.size()); }
  const Vector& initial_params() const { return initial_params_; }

  /// 2M / (lambda_min + lambda_max): the inner learning rate minimizing the
  /// long-horizon loss.
  double optimal_lr() const { return optimal_lr_; }

  double predicted_lr(const Vector& controller_params) const;

  /// Runs `horizon` inner steps from x0 = 0 at the controller's predicted
  /// learning rate and returns the final inner loss. A diverging trajectory
  /// propagates its non-finite loss to the caller.
  double meta_loss(const Vector& controller_params, int horizon) const;

  /// Same unroll at an explicitly given learning rate.
  double meta_loss_at_lr(double lr, int horizon) const;

  /// Exact gradient of meta_loss(params, T=1): one inner step has the closed
  /// form dL/d(lr) = -g0 . grad_inner(x0 - lr * g0), chained through the
  /// softplus and the controller backward pass.
  Vector surrogate_gradient(const Vector& controller_params) const;

  const Vector& hessian_eigenvalues() const { return eigenvalues_; }

 private:
  double inner_loss(const Vector& x) const;
  Vector inner_gradient(const Vector& x) const;

  int rows_ = kRows;  // M of the inner least-squares problem
  Matrix gram_;       // A^T A for the inner quadratic
  Vector atb_;
  double btb_ = 0.0;
  Vector eigenvalues_;  // of A^T A, ascending
  double optimal_lr_ = 0.0;
  MlpModel controller_;
  Vector initial_params_;
};

/// Mean-squared-error target f(x) = |x - x_target|^2 / 2 whose surrogate
/// gradient is synthesized by a learned scalar model (two 64-unit ReLU
/// layers) fit online to observed function values. Observations live in a
/// fixed-capacity ring buffer; each model update takes one Adam step on a
/// uniformly resampled batch.
class SyntheticGradProblem {
 public:
  static constexpr int kBufferCapacity = 8192;
  static constexpr int kBatchSize = 512;

  SyntheticGradProblem(int dim, std::uint64_t seed);

  int dim() const { return static_cast<int>(target_.size()); }
  const Vector& target() const { return target_; }

  double loss(const Vector& x) const { return 0.5 * (x - target_).squaredNorm(); }
  Vector true_gradient(const Vector& x) const { return x - target_; }

  /// Input gradient of the scalar model at x.
  Vector surrogate_gradient(const Vector& x) const;

  double model_value(const Vector& x) const;

  /// Records one (x, f(x)) observation, evicting the oldest past capacity.
  void observe(const Vector& x, double value);

  /// One Adam step of the model on the mean squared error over a batch of
  /// kBatchSize observations sampled uniformly with replacement. No-op while
  /// the buffer is empty.
  void model_update(RandomStream& batch_stream);

  /// Mean squared model error over a batch (for monitoring and tests).
  double model_mse(RandomStream& batch_stream, int batch_size) const;

  int buffer_size() const { return static_cast<int>(buffer_.size()); }
  const std::deque<std::pair<Vector, double>>& buffer() const { return buffer_; }

 private:
  Vector target_;
  MlpModel model_;
  OptimizerState model_optimizer_;
  std::deque<std::pair<Vector, double>> buffer_;
};

}  // namespace ges
