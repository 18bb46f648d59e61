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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "trust/errors.hpp"
#include "trust/graph_io.hpp"

namespace trust::attribution {
namespace {

using graph::InteractionGraph;
using graph::Role;

InteractionGraph load_cig(const char* name) {
  return graph::interaction_graph_from_json(graph::read_json_file(std::string(TRUST_TEST_DATA "/") + name));
}

graph::ReasoningGraph load_hdag() {
  return graph::reasoning_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/integration_hdag.json"));
}

std::map<NodeId, bool> all_pass(const graph::ReasoningGraph& g) {
  std::map<NodeId, bool> v;
  for (const auto& n : g.nodes) v[n.id] = true;
  return v;
}

TEST(LocalizeFaults, PipelineExample) {
  const auto r = localize_faults(load_cig("pipeline_cig.json"));
  EXPECT_EQ(r.statuses.at("planner"), NodeStatus::kValid);
  EXPECT_EQ(r.statuses.at("coder"), NodeStatus::kInvalidRoot);
  EXPECT_EQ(r.statuses.at("reviewer"), NodeStatus::kNegligent);
  EXPECT_EQ(r.statuses.at("aggregator"), NodeStatus::kInvalidCascade);
  EXPECT_EQ(r.root_causes, std::set<NodeId>{"coder"});
  EXPECT_EQ(r.negligent, std::set<NodeId>{"reviewer"});
  EXPECT_EQ(r.cascades, std::set<NodeId>{"aggregator"});
  EXPECT_FALSE(r.all_valid());
}

TEST(LocalizeFaults, AllValid) {
  const auto r = localize_faults(load_cig("all_valid_cig.json"));
  EXPECT_TRUE(r.all_valid());
  for (const auto& [id, s] : r.statuses) EXPECT_EQ(s, NodeStatus::kValid) << id;
}

TEST(LocalizeFaults, EdgeBreachMarksDownstreamRoot) {
  for (double score : {0.0, 0.5, 1.0}) {
    InteractionGraph g;
    g.nodes.resize(2);
    g.nodes[0].id = "a";
    g.nodes[1].id = "b";
    g.nodes[1].validity_score = score;
    g.edges.push_back({"a", "b", 0.5, 1.0});
    const auto r = localize_faults(g);
    EXPECT_EQ(r.statuses.at("a"), NodeStatus::kValid);
    EXPECT_EQ(r.statuses.at("b"), NodeStatus::kInvalidRoot);
    ASSERT_EQ(r.breached_edges.size(), 1u);
    EXPECT_EQ(r.breached_edges[0], (EdgeBreach{"a", "b", 0.5, 1.0}));
  }
}

TEST(LocalizeFaults, FidelityBreachAlsoCounts) {
  InteractionGraph g;
  g.nodes.resize(2);
  g.nodes[0].id = "a";
  g.nodes[1].id = "b";
  g.edges.push_back({"a", "b", 1.0, 0.79});
  EXPECT_EQ(localize_faults(g).statuses.at("b"), NodeStatus::kInvalidRoot);
  g.edges[0].fidelity_score = 0.8;
  EXPECT_EQ(localize_faults(g).statuses.at("b"), NodeStatus::kValid);
}

TEST(LocalizeFaults, CyclePropagates) {
  InteractionGraph g;
  g.nodes.resize(2);
  g.nodes[0].id = "a";
  g.nodes[1].id = "b";
  g.edges = {{"a", "b"}, {"b", "a"}};
  EXPECT_THROW(localize_faults(g), CycleError);
}

TEST(LocalizeFaults, AmbiguousReviewerIsCascadeAndFlagged) {
  auto g = load_cig("pipeline_cig.json");
  for (auto& n : g.nodes) {
    if (n.id == "reviewer") n.validity_score = 0.5;
  }
  const auto r = localize_faults(g);
  EXPECT_EQ(r.statuses.at("reviewer"), NodeStatus::kInvalidCascade);
  EXPECT_EQ(r.ambiguous_reviewers, std::set<NodeId>{"reviewer"});
}

TEST(LocalizeFaults, OrderRespectsParents) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_cig(rng, 12, 0.3);
    const auto r = localize_faults(g);
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < r.order.size(); ++i) pos[r.order[i]] = i;
    ASSERT_EQ(pos.size(), g.nodes.size());
    for (const auto& e : g.edges) EXPECT_LT(pos.at(e.from), pos.at(e.to));
  }
}

TEST(LocalizeFaults, MatchesCaseTableOracle) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const auto g = oracle::random_cig(rng, n, 0.3);
    const auto r = localize_faults(g);
    const auto expected = oracle::classify(g, 0.8, 0.8);
    ASSERT_EQ(r.statuses, expected) << "trial " << t;
  }
}

TEST(LocalizeFaults, Deterministic) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    const auto g = oracle::random_cig(rng, 20, 0.2);
    const auto a = localize_faults(g);
    const auto b = localize_faults(g);
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  }
}

TEST(LocalizeFaults, SetsPartitionNonValidNodes) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_cig(rng, 15, 0.25);
    const auto r = localize_faults(g);
    std::set<NodeId> non_valid;
    for (const auto& [id, s] : r.statuses) {
      if (s != NodeStatus::kValid) non_valid.insert(id);
    }
    std::set<NodeId> all;
    std::size_t total = r.root_causes.size() + r.cascades.size() + r.negligent.size();
    all.insert(r.root_causes.begin(), r.root_causes.end());
    all.insert(r.cascades.begin(), r.cascades.end());
    all.insert(r.negligent.begin(), r.negligent.end());
    EXPECT_EQ(all, non_valid);
    EXPECT_EQ(total, all.size());
  }
}

TEST(LocalizeFaults, CascadeSoundness) {
  std::mt19937_64 rng(25);
  const AuditThresholds th;
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_cig(rng, 15, 0.25);
    const auto r = localize_faults(g, th);
    for (const auto& n : g.nodes) {
      const auto s = r.statuses.at(n.id);
      bool any_invalid_parent = false;
      bool breach = false;
      for (const auto& e : g.edges) {
        if (e.to != n.id) continue;
        if (r.statuses.at(e.from) != NodeStatus::kValid) any_invalid_parent = true;
        if (!edge_passes(e, th)) breach = true;
      }
      if (s == NodeStatus::kInvalidCascade) {
        EXPECT_TRUE(any_invalid_parent) << n.id;
      }
      if (s == NodeStatus::kInvalidRoot) {
        EXPECT_TRUE(breach || !any_invalid_parent) << n.id;
      }
    }
  }
}

TEST(LocalizeFaults, RaisingTauNodeNeverShrinksFaults) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_cig(rng, 12, 0.3);
    std::set<NodeId> prev;
    for (double tau : {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 1.0}) {
      const auto r = localize_faults(g, {tau, 0.8, 0.95});
      std::set<NodeId> bad;
      for (const auto& [id, s] : r.statuses) {
        if (s != NodeStatus::kValid) bad.insert(id);
      }
      EXPECT_TRUE(std::includes(bad.begin(), bad.end(), prev.begin(), prev.end())) << "tau " << tau;
      prev = bad;
    }
  }
}

TEST(LocalizeFaults, JsonHasStableKeys) {
  const auto j = to_json(localize_faults(load_cig("pipeline_cig.json")));
  EXPECT_EQ(j.at("statuses").at("coder"), "invalid_root");
  EXPECT_EQ(j.at("root_causes"), nlohmann::json::array({"coder"}));
}

InteractionGraph rounds_of(std::initializer_list<std::optional<double>> sims) {
  InteractionGraph g;
  unsigned r = 0;
  for (auto s : sims) {
    graph::CigNode n;
    n.agent = "coder";
    n.round = r;
    n.id = graph::instance_id("coder", r);
    n.similarity_to_prev = s;
    if (r > 0) g.edges.push_back({graph::instance_id("coder", r - 1), n.id});
    g.nodes.push_back(n);
    ++r;
  }
  return g;
}

TEST(DetectStationarity, Examples) {
  EXPECT_EQ(detect_stationarity(rounds_of({std::nullopt, 0.97})), std::set<std::string>{"coder"});
  EXPECT_TRUE(detect_stationarity(rounds_of({std::nullopt, 0.90})).empty());
  EXPECT_EQ(detect_stationarity(rounds_of({std::nullopt, 0.80, 0.96})), std::set<std::string>{"coder"});
  EXPECT_EQ(detect_stationarity(rounds_of({std::nullopt, 0.95})), std::set<std::string>{"coder"});
}

TEST(DetectStationarity, UnrolledFixture) {
  EXPECT_EQ(detect_stationarity(load_cig("unrolled_loop_cig.json")), std::set<std::string>{"coder"});
  EXPECT_EQ(localize_faults(load_cig("unrolled_loop_cig.json")).stationary_agents, std::set<std::string>{"coder"});
}

TEST(DetectStationarity, MatchesPairwiseScan) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (int t = 0; t < 100; ++t) {
    InteractionGraph g;
    std::set<std::string> expected;
    for (int a = 0; a < 3; ++a) {
      const std::string agent = "agent" + std::to_string(a);
      const unsigned rounds = 1 + static_cast<unsigned>(rng() % 4);
      for (unsigned r = 0; r < rounds; ++r) {
        graph::CigNode n;
        n.agent = agent;
        n.round = r;
        n.id = graph::instance_id(agent, r);
        if (r > 0) {
          n.similarity_to_prev = std::round(u(rng) * 100.0) / 100.0;
          if (*n.similarity_to_prev >= 0.95) expected.insert(agent);
        }
        g.nodes.push_back(n);
      }
    }
    EXPECT_EQ(detect_stationarity(g), expected);
  }
}

TEST(TraceValidity, AllPass) {
  const auto g = load_hdag();
  const auto v = trace_validity(g, all_pass(g));
  EXPECT_TRUE(v.valid);
  EXPECT_TRUE(v.violated.empty());
}

TEST(TraceValidity, CriticalPathFailure) {
  const auto g = load_hdag();
  auto verdicts = all_pass(g);
  verdicts["v7"] = false;
  const auto v = trace_validity(g, verdicts);
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.violated, std::vector<TraceCondition>{TraceCondition::kCriticalPath});
  EXPECT_EQ(v.failed_critical, std::vector<NodeId>{"v7"});
  EXPECT_EQ(to_string(TraceCondition::kCriticalPath), "critical path");
}

TEST(TraceValidity, OffPathFailureIsTolerated) {
  auto g = load_hdag();
  graph::HdagNode side;
  side.id = "side";
  side.level = graph::Level::kOperation;
  side.tier = graph::assign_tier(side);
  g.nodes.push_back(side);
  g.edges.push_back({"v3", "side", graph::EdgeKind::kDecomposesTo});
  ASSERT_FALSE(graph::critical_path(g).contains("side"));
  auto verdicts = all_pass(g);
  verdicts["side"] = false;
  EXPECT_TRUE(trace_validity(g, verdicts).valid);
}

TEST(TraceValidity, LiveContradictionAndUnresolvedRoot) {
  auto g = load_hdag();
  g.edges.push_back({"v9", "v10", graph::EdgeKind::kContradicts});
  auto v = trace_validity(g, all_pass(g), {"v5"});
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.violated, (std::vector<TraceCondition>{TraceCondition::kContradiction, TraceCondition::kUnresolvedRoot}));
  EXPECT_EQ(v.live_contradictions.size(), 1u);
  EXPECT_EQ(v.unresolved_roots, std::vector<NodeId>{"v5"});
}

TEST(TraceValidity, MissingVerdict) {
  const auto g = load_hdag();
  auto verdicts = all_pass(g);
  verdicts.erase("v4");
  EXPECT_THROW(trace_validity(g, verdicts), MissingVerdict);
}

}  // namespace
}  // namespace trust::attribution
