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

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace ges {

/// Philox4x32-10 counter-based generator (Salmon et al., the Random123
/// family). A (key, counter) pair maps to four 32-bit words through ten
/// bijective rounds, so arbitrary streams can be addressed directly without
/// sequential state. This is what makes run-level determinism independent of
/// evaluation scheduling: every (seed, purpose, index, iteration) tuple owns
/// its own stream.
struct Philox4x32 {
  std::array<std::uint32_t, 2> key;

  explicit Philox4x32(std::uint64_t seed)
      : key{static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32)} {}

  std::array<std::uint32_t, 4> operator()(
      const std::array<std::uint32_t, 4>& counter) const;
};

/// Stream purposes. Each purpose gets a disjoint slice of the counter space
/// so that, e.g., problem construction can never collide with perturbation
/// draws for any iteration count.
enum class StreamPurpose : std::uint8_t {
  perturbation = 1,   // ES search noise, indexed by antithetic pair
  surrogate_noise = 2,// per-iteration noise in surrogate constructions
  construction = 3,   // problem instances (design matrices, targets, ...)
  model_init = 4,     // neural-network weight initialization
  model_train = 5,    // replay sampling and training batches
  generic = 6,        // tests and one-off consumers
};

struct StreamId {
  StreamPurpose purpose = StreamPurpose::generic;
  std::uint32_t index = 0;      // e.g. antithetic pair index, < 2^16
  std::uint64_t iteration = 0;  // < 2^40

  std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(purpose) << 56) |
           (static_cast<std::uint64_t>(index & 0xffff) << 40) |
           (iteration & 0xffffffffffu);
  }
};

/// A deterministic random stream: lane `i` of stream `id` under seed `s` is
/// a pure function of (s, id, i). Uniform and normal draws consume 64-bit
/// lanes in call order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId id)
      : engine_(seed), stream_(id.packed()) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * kInv53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Unbiased integer in [0, m), m >= 1. Fixed-point multiply; the bias for
  /// m << 2^64 is far below anything observable here.
  std::uint64_t uniform_index(std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * m) >> 64);
  }

  /// Standard normal via Box-Muller; draws are produced in pairs.
  double normal();

  void fill_normal(Eigen::VectorXd& v);
  Eigen::VectorXd normal_vector(Eigen::Index n);

  /// Uniformly distributed unit vector (normalized Gaussian).
  Eigen::VectorXd unit_vector(Eigen::Index n);

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

  Philox4x32 engine_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  bool have_block_ = false;  // second lane of the current block still unread
  double cached_normal_ = 0.0;
  bool have_normal_ = false;
};

}  // namespace ges
