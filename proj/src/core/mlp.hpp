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

#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace ges {

/// Small fully connected network: affine layers with rectified-linear
/// activations on every hidden layer and a linear final layer. Output
/// nonlinearities (softplus for positivity, etc.) are applied by the caller.
/// Parameters flatten to a single vector (per layer: weight matrix
/// column-major, then bias) so the whole model can ride through the
/// optimizers unchanged.
class MlpModel {
 public:
  struct Layer {
    Matrix weight;  // out x in
    Vector bias;
  };

  MlpModel() = default;

  /// Weights drawn uniform on +/- sqrt(3)/sqrt(fan_in) (unit-variance
  /// scaled-uniform), biases zero.
  static MlpModel create(const std::vector<int>& layer_sizes,
                         RandomStream& stream);

  Eigen::Index input_dim() const { return layers_.front().weight.cols(); }
  Eigen::Index output_dim() const { return layers_.back().weight.rows(); }
  Eigen::Index param_count() const;

  const std::vector<Layer>& layers() const { return layers_; }

  Vector flatten_params() const;
  void set_params(const Vector& flat);

  struct Trace {
    std::vector<Vector> inputs;  // input to each affine layer
    Vector output;
  };

  /// Forward pass; fills `trace` for a subsequent backward() when given.
  Vector forward(const Vector& input, Trace* trace = nullptr) const;

  struct Gradients {
    Vector params;  // flattened, same layout as flatten_params()
    Vector input;
  };

  /// Exact chain-rule gradients of output_grad . output with respect to all
  /// parameters and the input, for the forward pass recorded in `trace`.
  Gradients backward(const Trace& trace, const Vector& output_grad) const;

 private:
  std::vector<Layer> layers_;
};

inline double softplus(double x) {
  // log(1 + e^x), stable on both tails.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double softplus_derivative(double x) {
  return 1.0 / (1.0 + std::exp(-x));  // logistic sigmoid
}

}  // namespace ges
