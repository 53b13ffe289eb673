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

#include <cmath>
#include <set>

#include "core/rng.hpp"

using ges::Philox4x32;
using ges::RandomStream;
using ges::StreamId;
using ges::StreamPurpose;

TEST_CASE("philox4x32-10 matches the published Random123 vectors") {
  {
    Philox4x32 engine(0);
    const auto out = engine({0u, 0u, 0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    Philox4x32 engine(0xffffffffffffffffull);
    const auto out = engine({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    // key = (a4093822, 299f31d0), counter = pi digits.
    Philox4x32 engine(0x299f31d0a4093822ull);
    const auto out = engine({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("identical stream ids replay bitwise") {
  const StreamId id{StreamPurpose::perturbation, 7, 123456};
  RandomStream a(42, id);
  RandomStream b(42, id);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform01() == b.uniform01());
  }
}

TEST_CASE("distinct purposes, indexes, and iterations give distinct streams") {
  std::set<std::uint64_t> firsts;
  for (int purpose : {1, 2, 3}) {
    for (std::uint32_t index : {0u, 1u, 9u}) {
      for (std::uint64_t iter : {0ull, 1ull, 77ull}) {
        RandomStream s(5, StreamId{static_cast<StreamPurpose>(purpose), index,
                                   iter});
        firsts.insert(s.next_u64());
      }
    }
  }
  CHECK(firsts.size() == 27);
}

TEST_CASE("normal draws have standard moments") {
  RandomStream stream(99, StreamId{StreamPurpose::generic, 0, 0});
  const int count = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double z = stream.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / count;
  const double var = sum_sq / count - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(var - 1.0) < 8.0 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("uniform01 stays in range with correct mean") {
  RandomStream stream(7, StreamId{StreamPurpose::generic, 1, 0});
  const int count = 100000;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    const double u = stream.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / count - 0.5) < 0.005);
}

TEST_CASE("uniform_index covers the range") {
  RandomStream stream(11, StreamId{StreamPurpose::generic, 2, 0});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = stream.uniform_index(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("unit vectors have unit norm") {
  RandomStream stream(3, StreamId{StreamPurpose::generic, 3, 0});
  for (int i = 0; i < 20; ++i) {
    CHECK(stream.unit_vector(50).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
