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
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ges {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  degenerate_subspace,
  nonfinite_objective,
  io_failure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Hyperparameters of the guided search distribution
///   Sigma = (alpha/n) I + ((1-alpha)/k) U U^T,
/// which has unit trace for any orthonormal U. `alpha` trades search effort
/// between the full space (alpha=1, plain isotropic ES) and the guiding
/// subspace (alpha=0); `beta` scales the gradient estimate; `sigma` sets the
/// perturbation magnitude; `pairs` is the number of antithetic pairs per
/// estimate.
struct SearchConfig {
  double alpha = 0.5;
  double beta = 2.0;
  double sigma = 0.1;
  int pairs = 1;
  int subspace_dim = 1;  // k
  int param_dim = 1;     // n
};

/// Returns the config unchanged if every field is in range, otherwise throws
/// an Error naming the offending field.
SearchConfig validate_config(const SearchConfig& cfg);

/// A descent-direction estimate together with what it cost to produce.
struct GradientEstimate {
  Vector direction;
  long long function_evals = 0;
  long long surrogate_grad_evals = 0;
};

/// Normalized error decomposition of a gradient estimate: squared bias and
/// total variance, each divided by the squared true-gradient norm.
struct ErrorProfile {
  double bias = 0.0;
  double variance = 0.0;
  double total = 0.0;     // always bias + variance
  double rho_sq = 0.0;    // squared subspace correlation in [0, 1]
};

/// One iteration of an experiment trace.
struct RunRecord {
  long long iteration = 0;
  double loss = 0.0;
  double suboptimality = 0.0;
  double correlation = 0.0;  // subspace/true-gradient alignment, when tracked
  double aux = 0.0;          // experiment-specific extra metric, when tracked
  long long function_evals = 0;        // cumulative
  long long surrogate_grad_evals = 0;  // cumulative
  std::uint64_t seed = 0;
};

}  // namespace ges
