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

#include "trust/refinement.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "trust/errors.hpp"

namespace trust::refinement {

using attribution::FaultReport;
using graph::Adjacency;
using graph::InteractionGraph;
using graph::NodeStatus;

double temperature_for_round(int round) { return 0.7 + 0.1 * round; }

Feedback select_feedback(const graph::CigNode& node,
                         const std::set<std::string>& stationary_agents) {
  if (stationary_agents.contains(node.agent)) {
    return {FeedbackKind::kDivergence, "divergence.v1"};
  }
  if (node.error_tag == graph::ErrorTag::kStrategy) {
    return {FeedbackKind::kDirective, "directive.v1"};
  }
  return {FeedbackKind::kCorrective, "corrective.v1"};
}

RepairPlan plan_repair(const InteractionGraph& g, const FaultReport& report, int round) {
  if (report.root_causes.empty() && report.negligent.empty()) {
    throw NothingToRepair("no root causes or negligent nodes to repair");
  }
  Adjacency adj(g);
  RepairPlan plan;
  plan.round = round;
  plan.temperature = temperature_for_round(round);

  std::set<NodeId> seeds = report.root_causes;
  seeds.insert(report.negligent.begin(), report.negligent.end());
  for (const auto& id : seeds) {
    const std::size_t i = adj.index(id);
    plan.prune_set.insert(id);
    for (std::size_t d : adj.descendants(i)) plan.prune_set.insert(adj.id(d));
    plan.feedback.emplace(id, select_feedback(g.nodes[i], report.stationary_agents));
  }
  for (const auto& [id, status] : report.statuses) {
    if (status == NodeStatus::kValid && !plan.prune_set.contains(id)) plan.frozen_set.insert(id);
  }
  for (std::size_t i : adj.topo_order()) {
    if (plan.prune_set.contains(adj.id(i))) plan.repair_targets.push_back(adj.id(i));
  }
  return plan;
}

Digest state_digest(const InteractionGraph& g, const std::set<NodeId>& nodes) {
  Sha256 h;
  for (const auto& n : g.nodes) {
    if (!nodes.contains(n.id)) continue;
    h.update(n.id).update(std::uint8_t{0});
    h.update_u64(std::bit_cast<std::uint64_t>(n.validity_score));
    h.update(static_cast<std::uint8_t>(n.approved));
    h.update(std::span<const std::uint8_t>(n.output_hash));
  }
  return h.finish();
}

namespace {

std::multiset<NodeStatus> status_multiset(const FaultReport& r) {
  std::multiset<NodeStatus> out;
  for (const auto& [id, s] : r.statuses) out.insert(s);
  return out;
}

// Returns agents whose regenerated output is at least tau_stat similar to
// the output it replaced.
std::set<std::string> regenerate(InteractionGraph& g, const RepairPlan& plan,
                                 const Regenerator& regenerator, double tau_stat) {
  std::set<std::string> stuck;
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = i;

  for (const auto& id : plan.repair_targets) {
    graph::CigNode& node = g.nodes[index.at(id)];
    std::optional<Feedback> fb;
    if (auto it = plan.feedback.find(id); it != plan.feedback.end()) fb = it->second;

    Regeneration out;
    try {
      out = regenerator(RegenerationRequest{node, fb, plan.temperature, plan.round});
    } catch (const std::exception& e) {
      throw RegeneratorFailure("round " + std::to_string(plan.round) + ", node '" + id +
                               "': " + e.what());
    }
    if (!(out.validity_score >= 0.0 && out.validity_score <= 1.0)) {
      throw RegeneratorFailure("round " + std::to_string(plan.round) + ", node '" + id +
                               "': validity score outside [0,1]");
    }
    node.validity_score = out.validity_score;
    node.status = NodeStatus::kUnaudited;
    if (out.approved) node.approved = *out.approved;
    node.similarity_to_prev = out.similarity_to_prev;
    if (out.similarity_to_prev && *out.similarity_to_prev >= tau_stat) stuck.insert(node.agent);
    if (out.error_tag) node.error_tag = *out.error_tag;
    for (auto& e : g.edges) {
      if (e.to != id) continue;
      if (out.protocol_score) e.protocol_score = *out.protocol_score;
      if (out.fidelity_score) e.fidelity_score = *out.fidelity_score;
    }
  }
  return stuck;
}

}  // namespace

RefinementResult run_refinement_loop(InteractionGraph g, const attribution::AuditThresholds& th,
                                     const Regenerator& regenerator, int max_rounds) {
  if (max_rounds < 0) throw InvalidArgument("max_rounds must be non-negative");
  RefinementResult result;
  std::optional<std::multiset<NodeStatus>> previous;
  std::set<std::string> regenerated_stuck;

  for (int round = 0;; ++round) {
    RoundRecord record;
    record.round = round;
    record.report = attribution::localize_faults(g, th);
    record.report.stationary_agents.insert(regenerated_stuck.begin(), regenerated_stuck.end());
    auto statuses = status_multiset(record.report);

    std::optional<Termination> stop;
    if (record.report.all_valid()) {
      stop = Termination::kAllValid;
    } else if (previous && *previous == statuses && !record.report.stationary_agents.empty()) {
      stop = Termination::kStationary;
    } else if (round >= max_rounds) {
      stop = Termination::kMaxRounds;
    }
    if (stop) {
      result.termination = *stop;
      result.rounds = round;
      result.log.push_back(std::move(record));
      break;
    }

    RepairPlan plan = plan_repair(g, record.report, round);
    record.frozen_before = state_digest(g, plan.frozen_set);
    regenerated_stuck = regenerate(g, plan, regenerator, th.tau_stat);
    record.frozen_after = state_digest(g, plan.frozen_set);
    record.plan = std::move(plan);
    result.log.push_back(std::move(record));
    previous = std::move(statuses);
  }

  std::unordered_map<NodeId, NodeStatus> final_statuses(result.log.back().report.statuses.begin(),
                                                        result.log.back().report.statuses.end());
  for (auto& n : g.nodes) n.status = NodeStatus::kUnaudited;
  graph::apply_statuses(g, final_statuses);
  result.graph = std::move(g);
  return result;
}

RepairCost repair_cost(int error_depth, int max_depth) {
  if (max_depth < 1 || max_depth > 62 || error_depth < 1 || error_depth > max_depth) {
    throw DepthOutOfRange("need 1 <= d <= D <= 62, got d=" + std::to_string(error_depth) +
                          ", D=" + std::to_string(max_depth));
  }
  RepairCost c;
  c.global = (std::uint64_t{1} << max_depth) - 1;
  c.surgical = (std::uint64_t{1} << (max_depth - error_depth + 1)) - 1;
  c.savings = 1.0 - static_cast<double>(c.surgical) / static_cast<double>(c.global);
  return c;
}

RepairCost repair_cost(const InteractionGraph& g, std::string_view failed) {
  RepairCost c;
  c.global = g.nodes.size();
  c.surgical = 1 + graph::get_descendants(g, failed).size();
  c.savings = 1.0 - static_cast<double>(c.surgical) / static_cast<double>(c.global);
  return c;
}

InteractionGraph complete_binary_tree(int depth) {
  if (depth < 1 || depth > 20) throw DepthOutOfRange("tree depth must be in [1,20]");
  InteractionGraph g;
  const std::size_t n = (std::size_t{1} << depth) - 1;
  for (std::size_t i = 1; i <= n; ++i) {
    graph::CigNode node;
    node.id = "n" + std::to_string(i);
    node.agent = node.id;
    node.role = {graph::Role::kOther, "worker"};
    g.nodes.push_back(std::move(node));
    if (i > 1) g.edges.push_back({"n" + std::to_string(i / 2), "n" + std::to_string(i), 1.0, 1.0});
  }
  return g;
}

std::string_view to_string(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::kCorrective: return "corrective";
    case FeedbackKind::kDirective: return "directive";
    case FeedbackKind::kDivergence: return "divergence";
  }
  return "?";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kAllValid: return "all_valid";
    case Termination::kMaxRounds: return "max_rounds";
    case Termination::kStationary: return "stationary";
  }
  return "?";
}

nlohmann::json to_json(const RepairPlan& p) {
  nlohmann::json j;
  j["round"] = p.round;
  j["temperature"] = p.temperature;
  j["prune_set"] = p.prune_set;
  j["frozen_set"] = p.frozen_set;
  j["repair_targets"] = p.repair_targets;
  j["feedback"] = nlohmann::json::object();
  for (const auto& [id, fb] : p.feedback) {
    j["feedback"][id] = {{"kind", to_string(fb.kind)}, {"template", fb.message_template_id}};
  }
  return j;
}

nlohmann::json to_json(const RoundRecord& r) {
  nlohmann::json j;
  j["round"] = r.round;
  j["report"] = attribution::to_json(r.report);
  j["plan"] = r.plan ? to_json(*r.plan) : nlohmann::json(nullptr);
  if (r.frozen_before) j["frozen_digest_before"] = to_hex(*r.frozen_before);
  if (r.frozen_after) j["frozen_digest_after"] = to_hex(*r.frozen_after);
  return j;
}

}  // namespace trust::refinement
