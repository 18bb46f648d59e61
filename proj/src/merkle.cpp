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

#include "trust/merkle.hpp"

#include <vector>

#include "trust/errors.hpp"

namespace trust::ledger {

Digest merkle_leaf(const Digest& d) {
  Sha256 h;
  h.update(std::uint8_t{0x00}).update(std::span<const std::uint8_t>(d));
  return h.finish();
}

Digest merkle_node(const Digest& left, const Digest& right) {
  Sha256 h;
  h.update(std::uint8_t{0x01})
      .update(std::span<const std::uint8_t>(left))
      .update(std::span<const std::uint8_t>(right));
  return h.finish();
}

Digest merkle_root(std::span<const Digest> segment_digests) {
  if (segment_digests.empty()) throw EmptyList("merkle root of an empty list");
  std::vector<Digest> level;
  level.reserve(segment_digests.size());
  for (const auto& d : segment_digests) level.push_back(merkle_leaf(d));
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) next.push_back(merkle_node(level[i], level[i + 1]));
    level = std::move(next);
  }
  return level.front();
}

}  // namespace trust::ledger
