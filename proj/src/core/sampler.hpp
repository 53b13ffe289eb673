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

#include "core/rng.hpp"
#include "core/subspace.hpp"
#include "core/types.hpp"

namespace ges {

struct PerturbationPair {
  Vector positive;
  Vector negative;  // exact negation of positive
};

/// Draws from N(0, sigma^2 Sigma) without ever forming Sigma:
///   eps = sigma sqrt(alpha/n) z + sigma sqrt((1-alpha)/k_eff) U z',
/// z standard normal in R^n, z' standard normal over the effective basis
/// columns. The full-space draw consumes the stream first, so with alpha = 1
/// the result is bitwise identical to the plain-ES draw, basis or not.
/// During warm-up the effective rank substitutes for k, keeping the
/// covariance trace at one.
///
/// Requires a non-degenerate basis whenever alpha < 1; callers that hit a
/// degenerate subspace are expected to retry with alpha = 1.
Vector sample_perturbation(const SearchConfig& cfg, const SubspaceBasis& basis,
                           RandomStream& stream);

PerturbationPair antithetic_pair(const SearchConfig& cfg,
                                 const SubspaceBasis& basis,
                                 RandomStream& stream);

}  // namespace ges
