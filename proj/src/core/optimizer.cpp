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

#include "core/optimizer.hpp"

#include <cmath>
#include <string>

namespace ges {

Vector step(OptimizerState& state, const Vector& x, const Vector& g) {
  if (x.size() != g.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "iterate and gradient dimensions differ: " +
                    std::to_string(x.size()) + " vs " +
                    std::to_string(g.size()));
  }
  if (!g.allFinite()) {
    throw Error(ErrorCode::nonfinite_objective,
                "optimizer received a non-finite gradient");
  }

  if (state.kind == OptimizerState::Kind::sgd) {
    return x - state.learning_rate * g;
  }

  if (state.first_moment.size() != g.size()) {
    state.first_moment = Vector::Zero(g.size());
    state.second_moment = Vector::Zero(g.size());
    state.step_count = 0;
  }
  ++state.step_count;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * g;
  state.second_moment = state.beta2 * state.second_moment +
                        (1.0 - state.beta2) * g.cwiseProduct(g);
  const double correction1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double correction2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  const Vector m_hat = state.first_moment / correction1;
  const Vector v_hat = state.second_moment / correction2;
  return x - state.learning_rate *
                 (m_hat.array() / (v_hat.array().sqrt() + state.epsilon))
                     .matrix();
}

}  // namespace ges
