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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "trust/committee.hpp"
#include "trust/digest.hpp"
#include "trust/graph.hpp"

namespace trust::ledger {

/// Possession token standing in for a per-node symmetric key.
using KeyToken = Digest;

/// Off-graph node content, sealed per node. Opening a blob requires the
/// owning node's key token; seats receive tokens only through grants.
class ContentStore {
 public:
  explicit ContentStore(const Digest& master_secret);

  /// Stores node content and returns its content id (SHA-256 of the bytes).
  Digest put(const graph::NodeId& node, std::span<const std::uint8_t> content);

  /// Hands `seat` the keys of `node` and its immediate parents in `g`.
  /// Returns the keys granted by this call. Throws UnknownNode.
  std::map<graph::NodeId, KeyToken> grant_access(const SeatId& seat, const graph::NodeId& node,
                                                 const graph::ReasoningGraph& g);

  std::optional<std::vector<std::uint8_t>> open(const SeatId& seat, const Digest& content_id) const;

  KeyToken node_key(const graph::NodeId& node) const;
  std::set<graph::NodeId> granted_nodes(const SeatId& seat) const;
  std::set<graph::NodeId> keyed_nodes(const SeatId& seat) const;
  std::optional<Digest> content_id_of(const graph::NodeId& node) const;

 private:
  struct Sealed {
    graph::NodeId node;
    std::vector<std::uint8_t> bytes;
  };

  Digest master_secret_;
  std::map<Digest, Sealed> blobs_;
  std::map<graph::NodeId, Digest> content_by_node_;
  std::map<SeatId, std::set<graph::NodeId>> grants_;
  std::map<SeatId, std::map<graph::NodeId, KeyToken>> keys_;
};

/// Key-token grant helper matching the free-function form of the contract.
std::map<graph::NodeId, KeyToken> grant_access(ContentStore& store, const SeatId& seat,
                                               const graph::NodeId& node,
                                               const graph::ReasoningGraph& g);

}  // namespace trust::ledger
