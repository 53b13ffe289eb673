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

#include "core/types.hpp"

namespace ges {

/// First-order update rules behind one step interface. Moments are
/// zero-initialized lazily from the first gradient's dimension.
struct OptimizerState {
  enum class Kind { sgd, adam };

  Kind kind = Kind::sgd;
  double learning_rate = 0.1;

  // Adam constants and state.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Vector first_moment;
  Vector second_moment;
  long long step_count = 0;

  static OptimizerState sgd(double learning_rate) {
    OptimizerState s;
    s.kind = Kind::sgd;
    s.learning_rate = learning_rate;
    return s;
  }

  static OptimizerState adam(double learning_rate, double beta1 = 0.9,
                             double beta2 = 0.999, double epsilon = 1e-8) {
    OptimizerState s;
    s.kind = Kind::adam;
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
  }
};

/// Applies one update and returns the new iterate. SGD: x - lr * g. Adam:
/// standard bias-corrected moments. Rejects non-finite gradients.
Vector step(OptimizerState& state, const Vector& x, const Vector& g);

}  // namespace ges
