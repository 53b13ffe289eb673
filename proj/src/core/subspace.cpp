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

#include "core/subspace.hpp"

#include <algorithm>
#include <string>

namespace ges {

SubspaceBuffer::SubspaceBuffer(int capacity, Eigen::Index dim)
    : capacity_(capacity), dim_(dim) {
  if (capacity < 1) {
    throw Error(ErrorCode::invalid_argument,
                "buffer capacity must be positive: " + std::to_string(capacity));
  }
  if (dim < 1) {
    throw Error(ErrorCode::invalid_argument,
                "buffer dimension must be positive: " + std::to_string(dim));
  }
}

void SubspaceBuffer::push(const Vector& grad) {
  if (grad.size() != dim_) {
    throw Error(ErrorCode::dimension_mismatch,
                "gradient has dimension " + std::to_string(grad.size()) +
                    ", buffer expects " + std::to_string(dim_));
  }
  entries_.push_back(grad);
  if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
}

SubspaceBasis basis_of(const SubspaceBuffer& buffer) {
  if (buffer.empty()) {
    throw Error(ErrorCode::invalid_argument, "basis_of on an empty buffer");
  }
  const Eigen::Index n = buffer.dim();
  const int m = buffer.size();

  double max_norm = 0.0;
  for (const Vector& v : buffer.entries()) max_norm = std::max(max_norm, v.norm());
  if (max_norm == 0.0) {
    throw Error(ErrorCode::degenerate_subspace,
                "all buffered gradients are zero");
  }
  const double drop_threshold = 1e-10 * max_norm;

  SubspaceBasis basis{Matrix::Zero(n, m), 0};
  Vector work(n);
  for (const Vector& entry : buffer.entries()) {
    work = entry;
    // Two projection passes keep the columns orthogonal to ~1e-15 even when
    // entries are nearly dependent, which the single-pass variant does not.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < basis.effective_rank; ++j) {
        work.noalias() -= basis.columns.col(j) * basis.columns.col(j).dot(work);
      }
    }
    const double residual = work.norm();
    if (residual < drop_threshold) continue;
    basis.columns.col(basis.effective_rank) = work / residual;
    ++basis.effective_rank;
  }
  if (basis.effective_rank == 0) {
    throw Error(ErrorCode::degenerate_subspace,
                "buffered gradients span no direction");
  }
  return basis;
}

CorrelationVector correlation(const SubspaceBasis& basis, const Vector& grad) {
  if (grad.size() != basis.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "gradient has dimension " + std::to_string(grad.size()) +
                    ", basis expects " + std::to_string(basis.dim()));
  }
  CorrelationVector result;
  const double norm = grad.norm();
  if (norm == 0.0 || basis.effective_rank == 0) {
    result.rho = Vector::Zero(basis.effective_rank);
    result.norm = 0.0;
    return result;
  }
  result.rho = basis.effective().transpose() * (grad / norm);
  result.norm = result.rho.norm();
  return result;
}

}  // namespace ges
