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

#include <deque>

#include "core/types.hpp"

namespace ges {

/// FIFO of the k most recent surrogate gradients. Oldest entries are evicted
/// first once the buffer is full. Zero vectors are accepted (they simply
/// contribute no basis column later).
class SubspaceBuffer {
 public:
  SubspaceBuffer(int capacity, Eigen::Index dim);

  void push(const Vector& grad);

  int capacity() const { return capacity_; }
  Eigen::Index dim() const { return dim_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::deque<Vector>& entries() const { return entries_; }

 private:
  int capacity_;
  Eigen::Index dim_;
  std::deque<Vector> entries_;
};

/// Orthonormal basis of the buffered gradients. Only the first
/// `effective_rank` columns are meaningful; trailing columns are zero.
/// During warm-up (or under rank deficiency) effective_rank is below the
/// nominal subspace dimension, and the search covariance uses it in place of
/// k so that the trace stays exactly one.
struct SubspaceBasis {
  Matrix columns;          // n x (buffer size at build time)
  int effective_rank = 0;

  Eigen::Index dim() const { return columns.rows(); }
  auto effective() const { return columns.leftCols(effective_rank); }

  static SubspaceBasis empty(Eigen::Index dim) {
    return SubspaceBasis{Matrix::Zero(dim, 0), 0};
  }
};

/// Orthonormalizes the buffer entries in FIFO order (Gram-Schmidt with one
/// re-orthogonalization pass). Entries whose residual after projection falls
/// below 1e-10 times the largest entry norm are dropped, reducing
/// effective_rank. Throws degenerate_subspace if no entry survives; callers
/// are expected to fall back to plain ES (alpha = 1) for that step.
SubspaceBasis basis_of(const SubspaceBuffer& buffer);

/// Uncentered correlation between a gradient and each effective basis
/// column: rho_i = grad . U_i / |grad|. The norm lies in [0, 1] for an
/// orthonormal basis and measures how much of the gradient the subspace
/// captures. A zero gradient yields rho = 0 by convention.
struct CorrelationVector {
  Vector rho;
  double norm = 0.0;
};

CorrelationVector correlation(const SubspaceBasis& basis, const Vector& grad);

}  // namespace ges
