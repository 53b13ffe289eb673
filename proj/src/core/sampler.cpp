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

#include "core/sampler.hpp"

#include <cmath>
#include <string>

namespace ges {

Vector sample_perturbation(const SearchConfig& cfg, const SubspaceBasis& basis,
                           RandomStream& stream) {
  const Eigen::Index n = cfg.param_dim;
  Vector eps(n);
  stream.fill_normal(eps);
  eps *= cfg.sigma * std::sqrt(cfg.alpha / static_cast<double>(n));

  if (cfg.alpha == 1.0) return eps;

  const int k_eff = basis.effective_rank;
  if (k_eff == 0) {
    throw Error(ErrorCode::degenerate_subspace,
                "guided sampling with alpha < 1 requires a non-degenerate "
                "basis; fall back to alpha = 1");
  }
  if (basis.dim() != n) {
    throw Error(ErrorCode::dimension_mismatch,
                "basis dimension " + std::to_string(basis.dim()) +
                    " does not match param_dim " + std::to_string(n));
  }
  Vector low_rank(k_eff);
  stream.fill_normal(low_rank);
  eps.noalias() += basis.effective() *
                   (low_rank * (cfg.sigma * std::sqrt((1.0 - cfg.alpha) /
                                                      static_cast<double>(k_eff))));
  return eps;
}

PerturbationPair antithetic_pair(const SearchConfig& cfg,
                                 const SubspaceBasis& basis,
                                 RandomStream& stream) {
  PerturbationPair pair;
  pair.positive = sample_perturbation(cfg, basis, stream);
  pair.negative = -pair.positive;
  return pair;
}

}  // namespace ges
