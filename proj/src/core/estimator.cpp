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

#include "core/estimator.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "core/parallel.hpp"

namespace ges {

namespace {

RandomStream pair_stream(std::uint64_t seed, std::uint64_t iteration,
                         int pair_index) {
  return RandomStream(seed, StreamId{StreamPurpose::perturbation,
                                     static_cast<std::uint32_t>(pair_index),
                                     iteration});
}

}  // namespace

GradientEstimate estimate_gradient(const Objective& objective, const Vector& x,
                                   const SearchConfig& cfg,
                                   const SubspaceBasis& basis,
                                   std::uint64_t seed,
                                   std::uint64_t iteration) {
  const int pairs = cfg.pairs;
  std::vector<Vector> eps(pairs);
  std::vector<double> delta(pairs);  // f(x + eps) - f(x - eps)

  auto evaluate_pair = [&](std::size_t i) {
    RandomStream stream = pair_stream(seed, iteration, static_cast<int>(i));
    eps[i] = sample_perturbation(cfg, basis, stream);
    const double plus = objective.fn(x + eps[i]);
    const double minus = objective.fn(x - eps[i]);
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw Error(ErrorCode::nonfinite_objective,
                  "objective returned a non-finite value at perturbation " +
                      std::to_string(i));
    }
    delta[i] = plus - minus;
  };

  if (pairs > 1 && objective.concurrent_safe && thread_budget() > 1) {
    parallel_for(static_cast<std::size_t>(pairs), evaluate_pair);
  } else {
    for (int i = 0; i < pairs; ++i) evaluate_pair(static_cast<std::size_t>(i));
  }

  // Fixed-order reduction: the sum never depends on evaluation scheduling.
  GradientEstimate estimate;
  estimate.direction = Vector::Zero(x.size());
  for (int i = 0; i < pairs; ++i) {
    estimate.direction.noalias() += eps[i] * delta[i];
  }
  estimate.direction *=
      cfg.beta / (2.0 * cfg.sigma * cfg.sigma * static_cast<double>(pairs));
  estimate.function_evals = 2LL * pairs;
  estimate.surrogate_grad_evals = 0;
  return estimate;
}

Vector expected_update(const SearchConfig& cfg, const SubspaceBasis& basis,
                       const Vector& grad) {
  if (grad.size() != cfg.param_dim) {
    throw Error(ErrorCode::dimension_mismatch,
                "gradient has dimension " + std::to_string(grad.size()) +
                    ", config expects " + std::to_string(cfg.param_dim));
  }
  Vector update = (cfg.alpha / static_cast<double>(cfg.param_dim)) * grad;
  if (cfg.alpha < 1.0) {
    const int k_eff = basis.effective_rank;
    if (k_eff == 0) {
      throw Error(ErrorCode::degenerate_subspace,
                  "expected_update with alpha < 1 requires a basis");
    }
    if (basis.dim() != grad.size()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "basis dimension does not match gradient");
    }
    update.noalias() += basis.effective() *
                        (basis.effective().transpose() * grad) *
                        ((1.0 - cfg.alpha) / static_cast<double>(k_eff));
  }
  return cfg.beta * update;
}

}  // namespace ges
