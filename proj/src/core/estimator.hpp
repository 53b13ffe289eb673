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

#include <functional>

#include "core/sampler.hpp"
#include "core/subspace.hpp"
#include "core/types.hpp"

namespace ges {

/// Black-box objective. `concurrent_safe` declares whether fn may be invoked
/// from several threads at once; when false all evaluations stay on the
/// calling thread.
struct Objective {
  std::function<double(const Vector&)> fn;
  bool concurrent_safe = true;
};

/// Antithetic finite-difference estimate of a descent direction:
///   g = beta / (2 sigma^2 P) * sum_i eps_i (f(x + eps_i) - f(x - eps_i)),
/// with eps_i drawn from N(0, sigma^2 Sigma) on per-pair streams keyed by
/// (seed, iteration, pair index). Evaluations may run concurrently, but the
/// reduction is always in pair order, so the result is a pure function of
/// the seed. Costs exactly 2P function evaluations; f is never evaluated at
/// x itself.
///
/// Throws nonfinite_objective (message names the offending perturbation
/// index) if any evaluation returns a non-finite value.
GradientEstimate estimate_gradient(const Objective& objective, const Vector& x,
                                   const SearchConfig& cfg,
                                   const SubspaceBasis& basis,
                                   std::uint64_t seed, std::uint64_t iteration);

/// Mean of the estimator for a locally quadratic objective with gradient
/// `grad`: beta * ((alpha/n) grad + ((1-alpha)/k_eff) U U^T grad), computed
/// from the factors. This is the true gradient times a positive
/// semi-definite matrix, so following its negation can never ascend.
Vector expected_update(const SearchConfig& cfg, const SubspaceBasis& basis,
                       const Vector& grad);

}  // namespace ges
