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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "trust/graph.hpp"

namespace trust::attribution {

using graph::NodeId;
using graph::NodeStatus;

struct AuditThresholds {
  double tau_node = 0.8;
  double tau_edge = 0.8;
  double tau_stat = 0.95;
};

/// An incoming edge that failed the protocol or fidelity check. Its target
/// is classified InvalidRoot; the edge itself is recorded so blame is visible.
struct EdgeBreach {
  NodeId from;
  NodeId to;
  double protocol_score = 0.0;
  double fidelity_score = 0.0;

  bool operator==(const EdgeBreach&) const = default;
};

struct FaultReport {
  std::map<NodeId, NodeStatus> statuses;
  std::set<NodeId> root_causes;
  std::set<NodeId> cascades;
  std::set<NodeId> negligent;
  std::set<std::string> stationary_agents;
  std::vector<EdgeBreach> breached_edges;
  /// Reviewers that approved invalid input while scoring below tau_node
  /// themselves. They are labelled InvalidCascade.
  std::set<NodeId> ambiguous_reviewers;
  /// Order in which nodes were classified.
  std::vector<NodeId> order;

  bool all_valid() const { return root_causes.empty() && cascades.empty() && negligent.empty(); }
  bool operator==(const FaultReport&) const = default;
};

bool edge_passes(const graph::CigEdge& e, const AuditThresholds& th);

/// Classifies every node in topological order. Throws CycleError.
FaultReport localize_faults(const graph::InteractionGraph& g, const AuditThresholds& th = {});

/// Agents whose output in some round is at least tau_stat similar to their
/// previous round.
std::set<std::string> detect_stationarity(const graph::InteractionGraph& g,
                                          const AuditThresholds& th = {});

enum class TraceCondition { kCriticalPath, kContradiction, kUnresolvedRoot };

struct TraceValidity {
  bool valid = true;
  std::vector<TraceCondition> violated;
  std::vector<NodeId> failed_critical;
  std::vector<std::pair<NodeId, NodeId>> live_contradictions;
  std::vector<NodeId> unresolved_roots;
};

/// A trace is valid iff every critical-path node passes, no Contradicts edge
/// joins two passing nodes, and no InvalidRoot node is left unresolved.
/// Throws MissingVerdict if a node has no verdict.
TraceValidity trace_validity(const graph::ReasoningGraph& g,
                             const std::map<NodeId, bool>& segment_verdicts,
                             const std::set<NodeId>& unresolved_roots = {});

std::string_view to_string(TraceCondition c);

/// Stable-key JSON for golden-file comparison.
nlohmann::json to_json(const FaultReport& r);
nlohmann::json to_json(const TraceValidity& v);

}  // namespace trust::attribution
