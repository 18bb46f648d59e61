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

#include "trust/attribution.hpp"

#include <algorithm>

#include "trust/errors.hpp"

namespace trust::attribution {

using graph::Adjacency;
using graph::CigNode;
using graph::InteractionGraph;
using graph::Role;

bool edge_passes(const graph::CigEdge& e, const AuditThresholds& th) {
  return e.protocol_score >= th.tau_edge && e.fidelity_score >= th.tau_edge;
}

FaultReport localize_faults(const InteractionGraph& g, const AuditThresholds& th) {
  Adjacency adj(g);
  const std::vector<std::size_t> order = adj.topo_order();

  // Incoming edges per node, by index.
  std::vector<std::vector<const graph::CigEdge*>> incoming(adj.size());
  for (const auto& e : g.edges) incoming[adj.index(e.to)].push_back(&e);

  std::vector<NodeStatus> status(adj.size(), NodeStatus::kUnaudited);
  FaultReport report;
  for (std::size_t v : order) {
    const CigNode& node = g.nodes[v];
    const bool propagated = std::any_of(adj.parents(v).begin(), adj.parents(v).end(),
                                        [&](std::size_t p) { return status[p] != NodeStatus::kValid; });
    bool breached = false;
    for (const graph::CigEdge* e : incoming[v]) {
      if (!edge_passes(*e, th)) {
        breached = true;
        report.breached_edges.push_back({e->from, e->to, e->protocol_score, e->fidelity_score});
      }
    }

    const bool is_reviewer = node.role.kind == Role::kReviewer;
    if (breached) {
      status[v] = NodeStatus::kInvalidRoot;
    } else if (node.validity_score >= th.tau_node) {
      status[v] = (is_reviewer && node.approved && propagated) ? NodeStatus::kNegligent
                                                               : NodeStatus::kValid;
    } else if (propagated) {
      status[v] = NodeStatus::kInvalidCascade;
      if (is_reviewer && node.approved) report.ambiguous_reviewers.insert(node.id);
    } else {
      status[v] = NodeStatus::kInvalidRoot;
    }

    report.order.push_back(node.id);
    report.statuses[node.id] = status[v];
    switch (status[v]) {
      case NodeStatus::kInvalidRoot: report.root_causes.insert(node.id); break;
      case NodeStatus::kInvalidCascade: report.cascades.insert(node.id); break;
      case NodeStatus::kNegligent: report.negligent.insert(node.id); break;
      default: break;
    }
  }
  report.stationary_agents = detect_stationarity(g, th);
  return report;
}

std::set<std::string> detect_stationarity(const InteractionGraph& g, const AuditThresholds& th) {
  std::map<std::string, unsigned> first_round;
  for (const auto& n : g.nodes) {
    auto [it, inserted] = first_round.emplace(n.agent, n.round);
    if (!inserted) it->second = std::min(it->second, n.round);
  }
  std::set<std::string> stuck;
  for (const auto& n : g.nodes) {
    if (!n.similarity_to_prev || n.round == first_round[n.agent]) continue;
    if (*n.similarity_to_prev >= th.tau_stat) stuck.insert(n.agent);
  }
  return stuck;
}

TraceValidity trace_validity(const graph::ReasoningGraph& g,
                             const std::map<NodeId, bool>& segment_verdicts,
                             const std::set<NodeId>& unresolved_roots) {
  for (const auto& n : g.nodes) {
    if (!segment_verdicts.contains(n.id)) {
      throw MissingVerdict("no verdict for node '" + n.id + "'");
    }
  }
  TraceValidity out;
  for (const auto& id : graph::critical_path(g)) {
    if (!segment_verdicts.at(id)) out.failed_critical.push_back(id);
  }
  for (const auto& e : g.edges) {
    if (e.kind != graph::EdgeKind::kContradicts) continue;
    auto from = segment_verdicts.find(e.from);
    auto to = segment_verdicts.find(e.to);
    if (from != segment_verdicts.end() && to != segment_verdicts.end() && from->second &&
        to->second) {
      out.live_contradictions.emplace_back(e.from, e.to);
    }
  }
  out.unresolved_roots.assign(unresolved_roots.begin(), unresolved_roots.end());

  if (!out.failed_critical.empty()) out.violated.push_back(TraceCondition::kCriticalPath);
  if (!out.live_contradictions.empty()) out.violated.push_back(TraceCondition::kContradiction);
  if (!out.unresolved_roots.empty()) out.violated.push_back(TraceCondition::kUnresolvedRoot);
  out.valid = out.violated.empty();
  return out;
}

std::string_view to_string(TraceCondition c) {
  switch (c) {
    case TraceCondition::kCriticalPath: return "critical path";
    case TraceCondition::kContradiction: return "contradiction";
    case TraceCondition::kUnresolvedRoot: return "unresolved root";
  }
  return "?";
}

nlohmann::json to_json(const FaultReport& r) {
  nlohmann::json j;
  j["statuses"] = nlohmann::json::object();
  for (const auto& [id, s] : r.statuses) j["statuses"][id] = graph::to_string(s);
  j["root_causes"] = r.root_causes;
  j["cascades"] = r.cascades;
  j["negligent"] = r.negligent;
  j["stationary_agents"] = r.stationary_agents;
  j["ambiguous_reviewers"] = r.ambiguous_reviewers;
  j["order"] = r.order;
  j["breached_edges"] = nlohmann::json::array();
  for (const auto& b : r.breached_edges) {
    j["breached_edges"].push_back({{"from", b.from},
                                   {"to", b.to},
                                   {"protocol_score", b.protocol_score},
                                   {"fidelity_score", b.fidelity_score}});
  }
  j["all_valid"] = r.all_valid();
  return j;
}

nlohmann::json to_json(const TraceValidity& v) {
  nlohmann::json j;
  j["valid"] = v.valid;
  j["reasons"] = nlohmann::json::array();
  for (auto c : v.violated) j["reasons"].push_back(to_string(c));
  j["failed_critical"] = v.failed_critical;
  j["unresolved_roots"] = v.unresolved_roots;
  j["live_contradictions"] = nlohmann::json::array();
  for (const auto& [a, b] : v.live_contradictions) j["live_contradictions"].push_back({a, b});
  return j;
}

}  // namespace trust::attribution
