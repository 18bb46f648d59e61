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

#include <span>
#include <string>
#include <vector>

#include "trust/digest.hpp"
#include "trust/graph.hpp"

namespace trust::ledger {

using SeatId = std::string;

struct SeatInfo {
  SeatId id;
  double stake = 0.0;
  graph::Tier tier = graph::Tier::kHuman;
  bool available = true;
};

struct CommitteeMember {
  SeatId seat;
  double stake = 0.0;

  bool operator==(const CommitteeMember&) const = default;
};

using Committee = std::vector<CommitteeMember>;

/// Uniform variate in (0,1) derived from SHA-256(seed || seat id).
double seat_uniform(const Digest& seed, const SeatId& seat);

/// Stake-weighted sampling of k distinct available seats of tier t without
/// replacement (exponential-key reservoir over keyed hashes). Seats with zero
/// stake are never chosen. Members are returned in draw order. Throws
/// InsufficientSeats.
Committee select_committee(std::span<const SeatInfo> seats, graph::Tier t, int k,
                           const Digest& seed);

}  // namespace trust::ledger
