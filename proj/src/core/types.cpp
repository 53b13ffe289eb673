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

#include "core/types.hpp"

#include <cmath>

namespace ges {

SearchConfig validate_config(const SearchConfig& cfg) {
  if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0 || cfg.alpha > 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "alpha out of range [0, 1]: " + std::to_string(cfg.alpha));
  }
  if (!std::isfinite(cfg.beta) || cfg.beta < 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "beta must be nonnegative: " + std::to_string(cfg.beta));
  }
  if (!std::isfinite(cfg.sigma) || cfg.sigma <= 0.0) {
    throw Error(ErrorCode::invalid_argument,
                "sigma must be positive: " + std::to_string(cfg.sigma));
  }
  if (cfg.pairs < 1) {
    throw Error(ErrorCode::invalid_argument,
                "pairs must be a positive integer: " +
                    std::to_string(cfg.pairs));
  }
  if (cfg.param_dim < 1) {
    throw Error(ErrorCode::invalid_argument,
                "param_dim must be a positive integer: " +
                    std::to_string(cfg.param_dim));
  }
  if (cfg.subspace_dim < 1) {
    throw Error(ErrorCode::invalid_argument,
                "subspace_dim must be a positive integer: " +
                    std::to_string(cfg.subspace_dim));
  }
  if (cfg.subspace_dim > cfg.param_dim) {
    throw Error(ErrorCode::invalid_argument,
                "subspace_dim exceeds param_dim: k=" +
                    std::to_string(cfg.subspace_dim) +
                    ", n=" + std::to_string(cfg.param_dim));
  }
  return cfg;
}

}  // namespace ges
