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

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trust/digest.hpp"

namespace trust::graph {

using NodeId = std::string;

// ---------------------------------------------------------------------------
// Reasoning graph (hierarchical DAG over one reasoning trace)
// ---------------------------------------------------------------------------

/// Abstraction level; the numeric value is the level index used by the
/// hierarchy constraint (Goal = 0 ... Operation = 4).
enum class Level : int { kGoal = 0, kStrategy, kTactic, kStep, kOperation };
enum class Difficulty { kEasy, kMedium, kHard };
enum class Tier { kComputational, kLlm, kHuman };
enum class EdgeKind { kDecomposesTo, kDependsOn, kEnables, kValidates, kContradicts };

struct HdagNode {
  NodeId id;
  Level level = Level::kStep;
  Difficulty difficulty = Difficulty::kEasy;
  std::string domain;
  Digest content_hash{};
  Tier tier = Tier::kLlm;
  bool high_stakes = false;
};

struct HdagEdge {
  NodeId from;
  NodeId to;
  EdgeKind kind = EdgeKind::kDependsOn;
};

struct ReasoningGraph {
  std::vector<HdagNode> nodes;
  std::vector<HdagEdge> edges;
  NodeId goal_id;
  /// Node holding the final answer. When empty, the deepest Operation node
  /// with a Validates in-edge is used (see answer_node()).
  std::optional<NodeId> answer_id;

  const HdagNode* find(std::string_view id) const;
};

/// Routes a node to an auditor tier from its level, difficulty and stakes.
Tier assign_tier(const HdagNode& node);

enum class Rule {
  kDuplicateId,
  kDanglingEdge,
  kMissingGoal,
  kCycle,
  kLevelOrder,
  kUnreachable,
  kLeafLevel,
  kTierRouting,
};

struct Violation {
  Rule rule;
  NodeId node;
  std::optional<std::size_t> edge;  // index into ReasoningGraph::edges
  std::string detail;

  bool operator==(const Violation&) const = default;
};

/// Structural checks; an empty result means the graph is well formed.
std::vector<Violation> validate_hdag(const ReasoningGraph& g);

/// Resolves the answer node: the explicit mark, else the deepest Operation
/// node with a Validates in-edge. Empty when neither exists.
std::optional<NodeId> answer_node(const ReasoningGraph& g);

/// Nodes on the goal-to-answer chain: the answer node and every node that
/// reaches it backwards over DecomposesTo, DependsOn and Validates edges.
std::set<NodeId> critical_path(const ReasoningGraph& g);

// ---------------------------------------------------------------------------
// Interaction graph (one node per agent state, one per (agent, round))
// ---------------------------------------------------------------------------

enum class Role { kPlanner, kCoder, kReviewer, kAggregator, kOther };

struct AgentRole {
  Role kind = Role::kOther;
  std::string tag;  // free-form label when kind == kOther

  bool operator==(const AgentRole&) const = default;
};

enum class NodeStatus { kUnaudited, kValid, kInvalidRoot, kInvalidCascade, kNegligent };

/// Ingestion-time classification of what went wrong at a node; drives the
/// choice of repair feedback.
enum class ErrorTag { kNone, kFactual, kArithmetic, kLogical, kStrategy };

struct CigNode {
  NodeId id;
  std::string agent;
  AgentRole role;
  Digest input_hash{};
  Digest output_hash{};
  double validity_score = 1.0;
  NodeStatus status = NodeStatus::kUnaudited;
  unsigned round = 0;
  bool approved = false;  // reviewer approval flag on the output
  ErrorTag error_tag = ErrorTag::kNone;
  /// Similarity of this output to the same agent's previous round.
  std::optional<double> similarity_to_prev;
};

struct CigEdge {
  NodeId from;
  NodeId to;
  double protocol_score = 1.0;
  double fidelity_score = 1.0;
};

struct InteractionGraph {
  std::vector<CigNode> nodes;
  std::vector<CigEdge> edges;

  const CigNode* find(std::string_view id) const;
};

/// A message between agents in a raw (possibly cyclic) interaction log.
struct AgentMessage {
  std::string from_agent;
  std::string to_agent;
  unsigned round = 0;
  double protocol_score = 1.0;
  double fidelity_score = 1.0;
};

/// Conventional node id for an agent state: "agent#round".
NodeId instance_id(std::string_view agent, unsigned round);

/// Unrolls an agent-level log into one node per (agent, round). A message
/// sent in round r targets to_agent's round-r state and originates from the
/// latest state of from_agent at round <= r (strictly < r for self-loops).
/// `states` must carry agent and round; ids are assigned via instance_id.
InteractionGraph unroll(std::vector<CigNode> states, std::span<const AgentMessage> messages);

/// Sets the status of each node from `statuses`; a node may leave Unaudited
/// only once. Throws InvalidArgument on a second transition.
void apply_statuses(InteractionGraph& g, const std::unordered_map<NodeId, NodeStatus>& statuses);

// ---------------------------------------------------------------------------
// Traversal shared by both graph kinds
// ---------------------------------------------------------------------------

/// Index-based adjacency over node ids. Edges with unknown endpoints throw
/// UnknownNode.
class Adjacency {
 public:
  explicit Adjacency(const InteractionGraph& g);
  explicit Adjacency(const ReasoningGraph& g);

  std::size_t size() const { return ids_.size(); }
  const NodeId& id(std::size_t i) const { return ids_[i]; }
  std::size_t index(std::string_view id) const;  // throws UnknownNode
  std::optional<std::size_t> find(std::string_view id) const;
  const std::vector<std::size_t>& children(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& parents(std::size_t i) const { return in_[i]; }

  /// Kahn's algorithm with ties broken by ascending id. Throws CycleError.
  std::vector<std::size_t> topo_order() const;
  std::vector<std::size_t> descendants(std::size_t i) const;

 private:
  void build(std::vector<NodeId> ids, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::vector<NodeId> ids_;
  std::map<NodeId, std::size_t, std::less<>> by_id_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

std::vector<NodeId> topo_sort(const InteractionGraph& g);
std::set<NodeId> get_parents(const InteractionGraph& g, std::string_view v);
std::set<NodeId> get_parents(const ReasoningGraph& g, std::string_view v);
std::set<NodeId> get_descendants(const InteractionGraph& g, std::string_view v);
std::set<NodeId> get_descendants(const ReasoningGraph& g, std::string_view v);

std::string_view to_string(Level v);
std::string_view to_string(Difficulty v);
std::string_view to_string(Tier v);
std::string_view to_string(EdgeKind v);
std::string_view to_string(Rule v);
std::string_view to_string(NodeStatus v);
std::string_view to_string(ErrorTag v);
std::string to_string(const AgentRole& v);

}  // namespace trust::graph
