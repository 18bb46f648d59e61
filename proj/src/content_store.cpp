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

#include "trust/content_store.hpp"

#include "trust/errors.hpp"

namespace trust::ledger {

ContentStore::ContentStore(const Digest& master_secret) : master_secret_(master_secret) {}

KeyToken ContentStore::node_key(const graph::NodeId& node) const {
  Sha256 h;
  h.update("node-key").update(std::span<const std::uint8_t>(master_secret_)).update(node);
  return h.finish();
}

Digest ContentStore::put(const graph::NodeId& node, std::span<const std::uint8_t> content) {
  const Digest id = sha256(content);
  blobs_[id] = Sealed{node, std::vector<std::uint8_t>(content.begin(), content.end())};
  content_by_node_[node] = id;
  return id;
}

std::map<graph::NodeId, KeyToken> ContentStore::grant_access(const SeatId& seat,
                                                            const graph::NodeId& node,
                                                            const graph::ReasoningGraph& g) {
  std::map<graph::NodeId, KeyToken> granted;
  granted.emplace(node, node_key(node));
  for (const auto& parent : graph::get_parents(g, node)) granted.emplace(parent, node_key(parent));
  grants_[seat].insert(node);
  keys_[seat].insert(granted.begin(), granted.end());
  return granted;
}

std::optional<std::vector<std::uint8_t>> ContentStore::open(const SeatId& seat,
                                                            const Digest& content_id) const {
  auto blob = blobs_.find(content_id);
  if (blob == blobs_.end()) return std::nullopt;
  auto held = keys_.find(seat);
  if (held == keys_.end()) return std::nullopt;
  auto key = held->second.find(blob->second.node);
  if (key == held->second.end() || key->second != node_key(blob->second.node)) return std::nullopt;
  return blob->second.bytes;
}

std::set<graph::NodeId> ContentStore::granted_nodes(const SeatId& seat) const {
  auto it = grants_.find(seat);
  return it == grants_.end() ? std::set<graph::NodeId>{} : it->second;
}

std::set<graph::NodeId> ContentStore::keyed_nodes(const SeatId& seat) const {
  std::set<graph::NodeId> out;
  if (auto it = keys_.find(seat); it != keys_.end()) {
    for (const auto& [node, key] : it->second) out.insert(node);
  }
  return out;
}

std::optional<Digest> ContentStore::content_id_of(const graph::NodeId& node) const {
  auto it = content_by_node_.find(node);
  if (it == content_by_node_.end()) return std::nullopt;
  return it->second;
}

std::map<graph::NodeId, KeyToken> grant_access(ContentStore& store, const SeatId& seat,
                                               const graph::NodeId& node,
                                               const graph::ReasoningGraph& g) {
  return store.grant_access(seat, node, g);
}

}  // namespace trust::ledger
