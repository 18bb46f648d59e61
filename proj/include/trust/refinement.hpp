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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "trust/attribution.hpp"
#include "trust/graph.hpp"

namespace trust::refinement {

using graph::NodeId;

enum class FeedbackKind { kCorrective, kDirective, kDivergence };

struct Feedback {
  FeedbackKind kind = FeedbackKind::kCorrective;
  std::string message_template_id;

  bool operator==(const Feedback&) const = default;
};

struct RepairPlan {
  std::set<NodeId> prune_set;
  std::set<NodeId> frozen_set;
  std::vector<NodeId> repair_targets;  // prune set in regeneration (topological) order
  std::map<NodeId, Feedback> feedback;  // root causes and negligent reviewers
  double temperature = 0.7;
  int round = 0;
};

/// Sampling temperature for a repair round: starts at 0.7, +0.1 per round.
double temperature_for_round(int round);

Feedback select_feedback(const graph::CigNode& node, const std::set<std::string>& stationary_agents);

/// Throws NothingToRepair when the report has no root causes or negligent
/// nodes.
RepairPlan plan_repair(const graph::InteractionGraph& g, const attribution::FaultReport& report,
                       int round);

struct RegenerationRequest {
  const graph::CigNode& node;
  std::optional<Feedback> feedback;
  double temperature;
  int round;
};

/// Replacement values for a regenerated node. Edge scores, when set, apply
/// to every incoming edge of the node.
struct Regeneration {
  double validity_score = 1.0;
  std::optional<bool> approved;
  std::optional<double> similarity_to_prev;
  std::optional<double> protocol_score;
  std::optional<double> fidelity_score;
  std::optional<graph::ErrorTag> error_tag;
};

using Regenerator = std::function<Regeneration(const RegenerationRequest&)>;

enum class Termination { kAllValid, kMaxRounds, kStationary };

struct RoundRecord {
  int round = 0;
  attribution::FaultReport report;
  std::optional<RepairPlan> plan;
  /// Digest of the frozen nodes' state before and after regeneration.
  std::optional<Digest> frozen_before;
  std::optional<Digest> frozen_after;
};

struct RefinementResult {
  graph::InteractionGraph graph;
  std::vector<RoundRecord> log;
  Termination termination = Termination::kAllValid;
  int rounds = 0;  // index of the final audit round
};

inline constexpr int kDefaultMaxRounds = 5;

/// Audit-prune-regenerate until all nodes are valid, max_rounds repairs have
/// been made, or a stationary agent shows no change in the status multiset
/// between consecutive rounds. Regenerator exceptions surface as
/// RegeneratorFailure with the round and node.
RefinementResult run_refinement_loop(graph::InteractionGraph g,
                                     const attribution::AuditThresholds& th,
                                     const Regenerator& regenerator,
                                     int max_rounds = kDefaultMaxRounds);

/// Digest over (id, score, approval, output hash) of the given nodes.
Digest state_digest(const graph::InteractionGraph& g, const std::set<NodeId>& nodes);

struct RepairCost {
  std::uint64_t surgical = 0;
  std::uint64_t global = 0;
  double savings = 0.0;
};

/// Cost model on a complete binary tree whose root sits at depth 1 and whose
/// leaves sit at depth max_depth. Throws DepthOutOfRange.
RepairCost repair_cost(int error_depth, int max_depth);

/// Same quantities measured on a concrete graph: the failed node plus its
/// descendants versus every node.
RepairCost repair_cost(const graph::InteractionGraph& g, std::string_view failed);

/// Complete binary tree with nodes "n1".."n(2^D-1)" in heap order.
graph::InteractionGraph complete_binary_tree(int depth);

std::string_view to_string(FeedbackKind k);
std::string_view to_string(Termination t);

nlohmann::json to_json(const RepairPlan& p);
nlohmann::json to_json(const RoundRecord& r);

}  // namespace trust::refinement
