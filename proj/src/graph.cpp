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

#include "trust/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>

#include "trust/errors.hpp"

namespace trust::graph {

const HdagNode* ReasoningGraph::find(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const CigNode* InteractionGraph::find(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

Tier assign_tier(const HdagNode& node) {
  switch (node.level) {
    case Level::kOperation:
      return Tier::kComputational;
    case Level::kStep:
      return node.difficulty == Difficulty::kHard ? Tier::kHuman : Tier::kLlm;
    case Level::kTactic:
    case Level::kStrategy:
    case Level::kGoal:
      return (node.difficulty == Difficulty::kHard || node.high_stakes) ? Tier::kHuman
                                                                        : Tier::kLlm;
  }
  return Tier::kLlm;
}

// ---------------------------------------------------------------------------
// Adjacency

Adjacency::Adjacency(const InteractionGraph& g) {
  std::vector<NodeId> ids;
  ids.reserve(g.nodes.size());
  for (const auto& n : g.nodes) ids.push_back(n.id);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.from, e.to);
  build(std::move(ids), edges);
}

Adjacency::Adjacency(const ReasoningGraph& g) {
  std::vector<NodeId> ids;
  ids.reserve(g.nodes.size());
  for (const auto& n : g.nodes) ids.push_back(n.id);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.from, e.to);
  build(std::move(ids), edges);
}

void Adjacency::build(std::vector<NodeId> ids,
                      const std::vector<std::pair<NodeId, NodeId>>& edges) {
  ids_ = std::move(ids);
  out_.assign(ids_.size(), {});
  in_.assign(ids_.size(), {});
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!by_id_.emplace(ids_[i], i).second) {
      throw InvalidArgument("duplicate node id '" + ids_[i] + "'");
    }
  }
  for (const auto& [from, to] : edges) {
    const std::size_t u = index(from);
    const std::size_t v = index(to);
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
}

std::optional<std::size_t> Adjacency::find(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Adjacency::index(std::string_view id) const {
  auto idx = find(id);
  if (!idx) throw UnknownNode("unknown node '" + std::string(id) + "'");
  return *idx;
}

std::vector<std::size_t> Adjacency::topo_order() const {
  const std::size_t n = ids_.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = in_[v].size();

  auto later = [this](std::size_t a, std::size_t b) { return ids_[a] > ids_[b]; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    order.push_back(u);
    for (std::size_t v : out_[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (order.size() != n) {
    std::string stuck;
    for (std::size_t v = 0; v < n; ++v) {
      if (indegree[v] > 0) {
        if (!stuck.empty()) stuck += ", ";
        stuck += ids_[v];
      }
    }
    throw CycleError("graph has a cycle through or downstream of: " + stuck);
  }
  return order;
}

std::vector<std::size_t> Adjacency::descendants(std::size_t start) const {
  std::vector<bool> seen(ids_.size(), false);
  std::vector<std::size_t> stack(out_[start].begin(), out_[start].end());
  std::vector<std::size_t> result;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (seen[u]) continue;
    seen[u] = true;
    if (u != start) result.push_back(u);
    for (std::size_t v : out_[u]) {
      if (!seen[v]) stack.push_back(v);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

namespace {

template <typename G>
std::set<NodeId> parents_of(const G& g, std::string_view v) {
  Adjacency adj(g);
  std::set<NodeId> out;
  for (std::size_t p : adj.parents(adj.index(v))) out.insert(adj.id(p));
  return out;
}

template <typename G>
std::set<NodeId> descendants_of(const G& g, std::string_view v) {
  Adjacency adj(g);
  std::set<NodeId> out;
  for (std::size_t d : adj.descendants(adj.index(v))) out.insert(adj.id(d));
  return out;
}

}  // namespace

std::vector<NodeId> topo_sort(const InteractionGraph& g) {
  Adjacency adj(g);
  std::vector<NodeId> ids;
  for (std::size_t i : adj.topo_order()) ids.push_back(adj.id(i));
  return ids;
}

std::set<NodeId> get_parents(const InteractionGraph& g, std::string_view v) {
  return parents_of(g, v);
}
std::set<NodeId> get_parents(const ReasoningGraph& g, std::string_view v) {
  return parents_of(g, v);
}
std::set<NodeId> get_descendants(const InteractionGraph& g, std::string_view v) {
  return descendants_of(g, v);
}
std::set<NodeId> get_descendants(const ReasoningGraph& g, std::string_view v) {
  return descendants_of(g, v);
}

// ---------------------------------------------------------------------------
// Reasoning graph validation

std::vector<Violation> validate_hdag(const ReasoningGraph& g) {
  std::vector<Violation> report;

  std::map<NodeId, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!index.emplace(g.nodes[i].id, i).second) {
      report.push_back({Rule::kDuplicateId, g.nodes[i].id, std::nullopt, "duplicate node id"});
    }
  }

  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    auto u = index.find(edge.from);
    auto v = index.find(edge.to);
    if (u == index.end() || v == index.end()) {
      const NodeId& missing = (u == index.end()) ? edge.from : edge.to;
      report.push_back({Rule::kDanglingEdge, missing, e, "edge endpoint does not exist"});
      continue;
    }
    out[u->second].push_back(v->second);
    const auto lu = static_cast<int>(g.nodes[u->second].level);
    const auto lv = static_cast<int>(g.nodes[v->second].level);
    if (lu > lv) {
      report.push_back({Rule::kLevelOrder, edge.to, e,
                        std::string(to_string(g.nodes[u->second].level)) + " -> " +
                            std::string(to_string(g.nodes[v->second].level))});
    }
  }

  // A node lies on a cycle iff it can reach itself.
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack(out[s].begin(), out[s].end());
    bool cyclic = false;
    while (!stack.empty() && !cyclic) {
      const std::size_t u = stack.back();
      stack.pop_back();
      if (u == s) cyclic = true;
      if (seen[u]) continue;
      seen[u] = true;
      for (std::size_t v : out[u]) stack.push_back(v);
    }
    if (cyclic) report.push_back({Rule::kCycle, g.nodes[s].id, std::nullopt, "node lies on a cycle"});
  }

  auto goal = index.find(g.goal_id);
  if (goal == index.end()) {
    report.push_back({Rule::kMissingGoal, g.goal_id, std::nullopt, "goal node not present"});
  } else {
    std::vector<bool> reached(n, false);
    std::deque<std::size_t> queue{goal->second};
    reached[goal->second] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : out[u]) {
        if (!reached[v]) {
          reached[v] = true;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      // Later copies of a duplicate id are already reported as such.
      if (!reached[i] && index.at(g.nodes[i].id) == i) {
        report.push_back({Rule::kUnreachable, g.nodes[i].id, std::nullopt,
                          "not reachable from goal"});
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Level lvl = g.nodes[i].level;
    if (out[i].empty() && lvl != Level::kStep && lvl != Level::kOperation) {
      report.push_back({Rule::kLeafLevel, g.nodes[i].id, std::nullopt,
                        "leaf at level " + std::string(to_string(lvl))});
    }
    if (g.nodes[i].tier != assign_tier(g.nodes[i])) {
      report.push_back({Rule::kTierRouting, g.nodes[i].id, std::nullopt,
                        "tier " + std::string(to_string(g.nodes[i].tier)) + " but routing gives " +
                            std::string(to_string(assign_tier(g.nodes[i])))});
    }
  }
  return report;
}

std::optional<NodeId> answer_node(const ReasoningGraph& g) {
  if (g.answer_id) return g.answer_id;
  Adjacency adj(g);
  // Depth = longest path from any source, over the topological order.
  std::vector<std::size_t> depth(adj.size(), 0);
  for (std::size_t u : adj.topo_order()) {
    for (std::size_t v : adj.children(u)) depth[v] = std::max(depth[v], depth[u] + 1);
  }
  std::optional<std::size_t> best;
  for (const auto& e : g.edges) {
    if (e.kind != EdgeKind::kValidates) continue;
    const std::size_t v = adj.index(e.to);
    if (g.nodes[v].level != Level::kOperation) continue;
    if (!best || depth[v] > depth[*best] ||
        (depth[v] == depth[*best] && adj.id(v) < adj.id(*best))) {
      best = v;
    }
  }
  if (!best) return std::nullopt;
  return adj.id(*best);
}

std::set<NodeId> critical_path(const ReasoningGraph& g) {
  std::set<NodeId> path;
  auto answer = answer_node(g);
  if (!answer) return path;
  std::map<NodeId, std::vector<NodeId>, std::less<>> back;
  for (const auto& e : g.edges) {
    if (e.kind == EdgeKind::kDecomposesTo || e.kind == EdgeKind::kDependsOn ||
        e.kind == EdgeKind::kValidates) {
      back[e.to].push_back(e.from);
    }
  }
  std::vector<NodeId> stack{*answer};
  while (!stack.empty()) {
    NodeId u = std::move(stack.back());
    stack.pop_back();
    if (!path.insert(u).second) continue;
    if (auto it = back.find(u); it != back.end()) {
      for (const auto& p : it->second) stack.push_back(p);
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Interaction graph construction

NodeId instance_id(std::string_view agent, unsigned round) {
  return std::string(agent) + "#" + std::to_string(round);
}

InteractionGraph unroll(std::vector<CigNode> states, std::span<const AgentMessage> messages) {
  InteractionGraph g;
  std::map<std::string, std::vector<unsigned>, std::less<>> rounds_by_agent;
  for (auto& s : states) {
    s.id = instance_id(s.agent, s.round);
    rounds_by_agent[s.agent].push_back(s.round);
  }
  for (auto& [agent, rounds] : rounds_by_agent) std::sort(rounds.begin(), rounds.end());
  g.nodes = std::move(states);

  for (const auto& m : messages) {
    auto to_it = rounds_by_agent.find(m.to_agent);
    if (to_it == rounds_by_agent.end() ||
        !std::binary_search(to_it->second.begin(), to_it->second.end(), m.round)) {
      throw UnknownNode("no state for agent '" + m.to_agent + "' at round " +
                        std::to_string(m.round));
    }
    auto from_it = rounds_by_agent.find(m.from_agent);
    if (from_it == rounds_by_agent.end()) {
      throw UnknownNode("unknown agent '" + m.from_agent + "'");
    }
    const auto& rounds = from_it->second;
    const bool self = m.from_agent == m.to_agent;
    auto upper = self ? std::lower_bound(rounds.begin(), rounds.end(), m.round)
                      : std::upper_bound(rounds.begin(), rounds.end(), m.round);
    if (upper == rounds.begin()) {
      throw UnknownNode("agent '" + m.from_agent + "' has no state at or before round " +
                        std::to_string(m.round));
    }
    const unsigned source_round = *std::prev(upper);
    g.edges.push_back({instance_id(m.from_agent, source_round), instance_id(m.to_agent, m.round),
                       m.protocol_score, m.fidelity_score});
  }
  return g;
}

void apply_statuses(InteractionGraph& g,
                    const std::unordered_map<NodeId, NodeStatus>& statuses) {
  for (auto& n : g.nodes) {
    auto it = statuses.find(n.id);
    if (it == statuses.end()) continue;
    if (n.status != NodeStatus::kUnaudited && n.status != it->second) {
      throw InvalidArgument("node '" + n.id + "' already audited as " +
                            std::string(to_string(n.status)));
    }
    n.status = it->second;
  }
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Level v) {
  switch (v) {
    case Level::kGoal: return "goal";
    case Level::kStrategy: return "strategy";
    case Level::kTactic: return "tactic";
    case Level::kStep: return "step";
    case Level::kOperation: return "operation";
  }
  return "?";
}

std::string_view to_string(Difficulty v) {
  switch (v) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "?";
}

std::string_view to_string(Tier v) {
  switch (v) {
    case Tier::kComputational: return "computational";
    case Tier::kLlm: return "llm";
    case Tier::kHuman: return "human";
  }
  return "?";
}

std::string_view to_string(EdgeKind v) {
  switch (v) {
    case EdgeKind::kDecomposesTo: return "decomposes_to";
    case EdgeKind::kDependsOn: return "depends_on";
    case EdgeKind::kEnables: return "enables";
    case EdgeKind::kValidates: return "validates";
    case EdgeKind::kContradicts: return "contradicts";
  }
  return "?";
}

std::string_view to_string(Rule v) {
  switch (v) {
    case Rule::kDuplicateId: return "duplicate_id";
    case Rule::kDanglingEdge: return "dangling_edge";
    case Rule::kMissingGoal: return "missing_goal";
    case Rule::kCycle: return "cycle";
    case Rule::kLevelOrder: return "level_order";
    case Rule::kUnreachable: return "unreachable";
    case Rule::kLeafLevel: return "leaf_level";
    case Rule::kTierRouting: return "tier_routing";
  }
  return "?";
}

std::string_view to_string(NodeStatus v) {
  switch (v) {
    case NodeStatus::kUnaudited: return "unaudited";
    case NodeStatus::kValid: return "valid";
    case NodeStatus::kInvalidRoot: return "invalid_root";
    case NodeStatus::kInvalidCascade: return "invalid_cascade";
    case NodeStatus::kNegligent: return "negligent";
  }
  return "?";
}

std::string_view to_string(ErrorTag v) {
  switch (v) {
    case ErrorTag::kNone: return "none";
    case ErrorTag::kFactual: return "factual";
    case ErrorTag::kArithmetic: return "arithmetic";
    case ErrorTag::kLogical: return "logical";
    case ErrorTag::kStrategy: return "strategy";
  }
  return "?";
}

std::string to_string(const AgentRole& v) {
  switch (v.kind) {
    case Role::kPlanner: return "planner";
    case Role::kCoder: return "coder";
    case Role::kReviewer: return "reviewer";
    case Role::kAggregator: return "aggregator";
    case Role::kOther: return v.tag.empty() ? "other" : v.tag;
  }
  return "other";
}

}  // namespace trust::graph
