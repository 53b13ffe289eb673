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

#include "core/mlp.hpp"

#include <cmath>
#include <string>

namespace ges {

MlpModel MlpModel::create(const std::vector<int>& layer_sizes,
                          RandomStream& stream) {
  if (layer_sizes.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "an MLP needs at least input and output sizes");
  }
  MlpModel model;
  model.layers_.reserve(layer_sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    if (fan_in < 1 || fan_out < 1) {
      throw Error(ErrorCode::invalid_argument, "layer sizes must be positive");
    }
    Layer layer;
    layer.weight = Matrix(fan_out, fan_in);
    const double bound = std::sqrt(3.0) / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
        layer.weight(i, j) = stream.uniform(-bound, bound);
      }
    }
    layer.bias = Vector::Zero(fan_out);
    model.layers_.push_back(std::move(layer));
  }
  return model;
}

Eigen::Index MlpModel::param_count() const {
  Eigen::Index count = 0;
  for (const Layer& layer : layers_) {
    count += layer.weight.size() + layer.bias.size();
  }
  return count;
}

Vector MlpModel::flatten_params() const {
  Vector flat(param_count());
  Eigen::Index offset = 0;
  for (const Layer& layer : layers_) {
    flat.segment(offset, layer.weight.size()) =
        Eigen::Map<const Vector>(layer.weight.data(), layer.weight.size());
    offset += layer.weight.size();
    flat.segment(offset, layer.bias.size()) = layer.bias;
    offset += layer.bias.size();
  }
  return flat;
}

void MlpModel::set_params(const Vector& flat) {
  if (flat.size() != param_count()) {
    throw Error(ErrorCode::dimension_mismatch,
                "parameter vector has size " + std::to_string(flat.size()) +
                    ", model expects " + std::to_string(param_count()));
  }
  Eigen::Index offset = 0;
  for (Layer& layer : layers_) {
    Eigen::Map<Vector>(layer.weight.data(), layer.weight.size()) =
        flat.segment(offset, layer.weight.size());
    offset += layer.weight.size();
    layer.bias = flat.segment(offset, layer.bias.size());
    offset += layer.bias.size();
  }
}

Vector MlpModel::forward(const Vector& input, Trace* trace) const {
  if (input.size() != input_dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "input has size " + std::to_string(input.size()) +
                    ", model expects " + std::to_string(input_dim()));
  }
  if (!input.allFinite()) {
    throw Error(ErrorCode::nonfinite_objective, "non-finite MLP input");
  }
  if (trace) {
    trace->inputs.clear();
    trace->inputs.reserve(layers_.size());
  }
  Vector activation = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (trace) trace->inputs.push_back(activation);
    activation = layers_[l].weight * activation + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      activation = activation.cwiseMax(0.0);  // ReLU on hidden layers
    }
  }
  if (trace) trace->output = activation;
  return activation;
}

MlpModel::Gradients MlpModel::backward(const Trace& trace,
                                       const Vector& output_grad) const {
  if (trace.inputs.size() != layers_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "trace does not match model depth; run forward() with a trace");
  }
  if (output_grad.size() != output_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "output gradient size mismatch");
  }

  Gradients grads;
  grads.params = Vector(param_count());

  // Per-layer parameter offsets in the flattened layout.
  std::vector<Eigen::Index> offsets(layers_.size());
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offsets[l] = offset;
    offset += layers_[l].weight.size() + layers_[l].bias.size();
  }

  Vector upstream = output_grad;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const Vector& layer_input = trace.inputs[l];
    if (l + 1 < layers_.size()) {
      // Through the ReLU: the post-activation equals the next layer's input,
      // nonzero exactly where the pre-activation was positive.
      const Vector& post = trace.inputs[l + 1];
      upstream = (post.array() > 0.0).select(upstream, 0.0);
    }
    Eigen::Map<Matrix> weight_grad(grads.params.data() + offsets[l],
                                   layer.weight.rows(), layer.weight.cols());
    weight_grad.noalias() = upstream * layer_input.transpose();
    grads.params.segment(offsets[l] + layer.weight.size(),
                         layer.bias.size()) = upstream;
    upstream = layer.weight.transpose() * upstream;
  }
  grads.input = std::move(upstream);
  return grads;
}

}  // namespace ges
