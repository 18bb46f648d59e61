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

#include "trust/committee.hpp"

#include <algorithm>
#include <cmath>

#include "trust/errors.hpp"

namespace trust::ledger {

double seat_uniform(const Digest& seed, const SeatId& seat) {
  Sha256 h;
  h.update(std::span<const std::uint8_t>(seed)).update(seat);
  const std::uint64_t bits = digest_prefix_u64(h.finish()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Committee select_committee(std::span<const SeatInfo> seats, graph::Tier t, int k,
                           const Digest& seed) {
  if (k < 1) throw InvalidArgument("committee size must be >= 1");
  struct Keyed {
    double key;
    const SeatInfo* seat;
  };
  std::vector<Keyed> eligible;
  for (const auto& s : seats) {
    if (s.tier != t || !s.available || !(s.stake > 0.0)) continue;
    // u^(1/stake) ranks seats so the first draw is proportional to stake;
    // compare in log space.
    eligible.push_back({std::log(seat_uniform(seed, s.id)) / s.stake, &s});
  }
  if (eligible.size() < static_cast<std::size_t>(k)) {
    throw InsufficientSeats("need " + std::to_string(k) + " seats of tier " +
                            std::string(graph::to_string(t)) + ", have " +
                            std::to_string(eligible.size()));
  }
  std::sort(eligible.begin(), eligible.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.seat->id < b.seat->id;
  });
  Committee out;
  for (int i = 0; i < k; ++i) out.push_back({eligible[i].seat->id, eligible[i].seat->stake});
  return out;
}

}  // namespace trust::ledger
