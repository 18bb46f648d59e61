// Copyright 2026 The trust-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace trust::rng {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Counter-mode stream over Philox4x32-10. The 64-bit key selects the
/// stream; the counter walks blocks from zero. Satisfies
/// UniformRandomBitGenerator.
class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(std::uint64_t key);

  result_type operator()();
  std::uint64_t next_u64();
  /// Uniform in the open interval (0,1) with 53 bits of resolution.
  double uniform();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buf_{};
  int used_ = 4;
};

/// Stream key derived by SHA-256 over the seed and coordinates, so distinct
/// coordinate tuples give statistically independent streams.
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);
Philox substream(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

bool bernoulli(Philox& g, double p);

/// Poisson variate: inversion (in chunks of mean <= 500) up to mean 1000,
/// transformed rejection (PTRS) above.
std::uint64_t poisson(Philox& g, double mean);

}  // namespace trust::rng
