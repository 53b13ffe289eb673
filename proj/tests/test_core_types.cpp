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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "core/rng.hpp"
#include "core/subspace.hpp"
#include "core/types.hpp"

using ges::Error;
using ges::ErrorCode;
using ges::Matrix;
using ges::SearchConfig;
using ges::Vector;

namespace {

SearchConfig make_config(double alpha, double beta, double sigma, int pairs,
                         int k, int n) {
  SearchConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.sigma = sigma;
  cfg.pairs = pairs;
  cfg.subspace_dim = k;
  cfg.param_dim = n;
  return cfg;
}

// The covariance assembled explicitly, for small-instance checks only; the
// library itself never forms it.
Matrix assemble_covariance(const SearchConfig& cfg, const Matrix& basis) {
  const double n = cfg.param_dim;
  const double k = static_cast<double>(basis.cols());
  return (cfg.alpha / n) * Matrix::Identity(cfg.param_dim, cfg.param_dim) +
         ((1.0 - cfg.alpha) / k) * basis * basis.transpose();
}

Matrix random_orthonormal(int n, int k, std::uint64_t seed) {
  ges::RandomStream stream(seed, ges::StreamId{ges::StreamPurpose::generic, 0, 0});
  ges::SubspaceBuffer buffer(k, n);
  for (int j = 0; j < k; ++j) buffer.push(stream.normal_vector(n));
  const ges::SubspaceBasis basis = ges::basis_of(buffer);
  REQUIRE(basis.effective_rank == k);
  return basis.columns.leftCols(k);
}

}  // namespace

TEST_CASE("paper-protocol configuration validates") {
  const SearchConfig cfg = make_config(0.5, 2.0, 0.1, 1, 10, 1000);
  const SearchConfig out = ges::validate_config(cfg);
  CHECK(out.alpha == cfg.alpha);
  CHECK(out.subspace_dim == cfg.subspace_dim);
}

TEST_CASE("out-of-range fields are rejected by name") {
  CHECK_THROWS_WITH_AS(ges::validate_config(make_config(1.2, 2, 0.1, 1, 3, 10)),
                       doctest::Contains("alpha"), Error);
  CHECK_THROWS_WITH_AS(ges::validate_config(make_config(0.5, -1, 0.1, 1, 3, 10)),
                       doctest::Contains("beta"), Error);
  CHECK_THROWS_WITH_AS(ges::validate_config(make_config(0.5, 2, 0.0, 1, 3, 10)),
                       doctest::Contains("sigma"), Error);
  CHECK_THROWS_WITH_AS(ges::validate_config(make_config(0.5, 2, 0.1, 0, 3, 10)),
                       doctest::Contains("pairs"), Error);
}

TEST_CASE("k exceeding n is its own error") {
  try {
    ges::validate_config(make_config(0.5, 2, 0.1, 1, 101, 100));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("exceeds") != std::string::npos);
  }
}

TEST_CASE("assembled covariance has unit trace for any valid config") {
  ges::RandomStream pick(13, ges::StreamId{ges::StreamPurpose::generic, 1, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(pick.uniform_index(60));
    const int k = 1 + static_cast<int>(pick.uniform_index(n));
    const SearchConfig cfg =
        make_config(pick.uniform01(), 4.0 * pick.uniform01(), 0.1, 1, k, n);
    const Matrix basis = random_orthonormal(n, k, 1000 + trial);
    const double trace = assemble_covariance(cfg, basis).trace();
    CHECK(trace == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("assembled covariance is positive semi-definite") {
  const int n = 40;
  const int k = 5;
  const Matrix basis = random_orthonormal(n, k, 77);
  ges::RandomStream stream(21, ges::StreamId{ges::StreamPurpose::generic, 2, 0});
  for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
    const SearchConfig cfg = make_config(alpha, 2.0, 0.1, 1, k, n);
    const Matrix cov = assemble_covariance(cfg, basis);
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector v = stream.unit_vector(n);
      CHECK(v.dot(cov * v) >= -1e-14);
    }
  }
}

TEST_CASE("error profile bookkeeping") {
  ges::ErrorProfile profile;
  profile.bias = 0.25;
  profile.variance = 1.5;
  profile.total = profile.bias + profile.variance;
  CHECK(profile.total == 1.75);
}
