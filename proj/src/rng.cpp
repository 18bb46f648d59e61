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

#include "trust/rng.hpp"

#include <algorithm>
#include <cmath>

#include "trust/digest.hpp"
#include "trust/errors.hpp"

namespace trust::rng {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;
constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;

std::uint64_t poisson_inversion(Philox& g, double mean) {
  const double p0 = std::exp(-mean);
  double u = g.uniform();
  double p = p0;
  std::uint64_t k = 0;
  while (u > p) {
    u -= p;
    ++k;
    p *= mean / static_cast<double>(k);
    if (p <= 0.0) break;  // tail exhausted by rounding
  }
  return k;
}

std::uint64_t poisson_ptrs(Philox& g, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = g.uniform() - 0.5;
    const double v = g.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

Philox::Philox(std::uint64_t key)
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

Philox::result_type Philox::operator()() {
  if (used_ == 4) {
    buf_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), 0, 0},
                         key_);
    ++block_;
    used_ = 0;
  }
  return buf_[used_++];
}

std::uint64_t Philox::next_u64() {
  const std::uint64_t hi = (*this)();
  return (hi << 32) | (*this)();
}

double Philox::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
  Sha256 h;
  h.update("philox-stream").update_u64(seed);
  for (auto c : coords) h.update_u64(c);
  return digest_prefix_u64(h.finish());
}

Philox substream(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
  return Philox(derive_key(seed, coords));
}

bool bernoulli(Philox& g, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return g.uniform() < p;
}

std::uint64_t poisson(Philox& g, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidArgument("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean > 1000.0) return poisson_ptrs(g, mean);
  std::uint64_t total = 0;
  double left = mean;
  while (left > 0.0) {
    const double part = std::min(left, 500.0);
    total += poisson_inversion(g, part);
    left -= part;
  }
  return total;
}

}  // namespace trust::rng
