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

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "trust/errors.hpp"
#include "trust/graph_io.hpp"

namespace trust::refinement {
namespace {

using attribution::AuditThresholds;
using graph::InteractionGraph;
using graph::NodeStatus;

InteractionGraph pipeline() {
  return graph::interaction_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/pipeline_cig.json"));
}

InteractionGraph failing_chain(int n) {
  InteractionGraph g;
  for (int i = 0; i < n; ++i) {
    graph::CigNode node;
    node.id = "c" + std::to_string(i);
    node.agent = node.id;
    node.validity_score = 0.2;
    g.nodes.push_back(node);
    if (i > 0) g.edges.push_back({"c" + std::to_string(i - 1), node.id});
  }
  return g;
}

Regeneration keep(double score) {
  Regeneration r;
  r.validity_score = score;
  return r;
}

TEST(PlanRepair, PipelineExample) {
  const auto g = pipeline();
  const auto report = attribution::localize_faults(g);
  const auto plan = plan_repair(g, report, 0);
  EXPECT_EQ(plan.prune_set, (std::set<NodeId>{"coder", "reviewer", "aggregator"}));
  EXPECT_EQ(plan.frozen_set, std::set<NodeId>{"planner"});
  EXPECT_EQ(plan.repair_targets, (std::vector<NodeId>{"coder", "reviewer", "aggregator"}));
  EXPECT_DOUBLE_EQ(plan.temperature, 0.7);
  EXPECT_EQ(plan.feedback.at("coder").kind, FeedbackKind::kCorrective);
  EXPECT_TRUE(plan.feedback.contains("reviewer"));
  EXPECT_FALSE(plan.feedback.contains("aggregator"));
}

TEST(PlanRepair, PruneSetMatchesDescendantOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_cig(rng, 15, 0.2);
    const auto report = attribution::localize_faults(g);
    if (report.root_causes.empty() && report.negligent.empty()) continue;
    const auto plan = plan_repair(g, report, 0);
    std::set<NodeId> expected;
    std::set<NodeId> seeds = report.root_causes;
    seeds.insert(report.negligent.begin(), report.negligent.end());
    for (const auto& s : seeds) {
      expected.insert(s);
      auto d = oracle::descendants_fixed_point(g, s);
      expected.insert(d.begin(), d.end());
    }
    EXPECT_EQ(plan.prune_set, expected);
    for (const auto& id : plan.frozen_set) EXPECT_FALSE(plan.prune_set.contains(id));
    for (const auto& id : plan.prune_set) {
      for (const auto& d : oracle::descendants_fixed_point(g, id)) EXPECT_TRUE(plan.prune_set.contains(d));
    }
  }
}

TEST(PlanRepair, NothingToRepair) {
  auto g = graph::interaction_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/all_valid_cig.json"));
  EXPECT_THROW(plan_repair(g, attribution::localize_faults(g), 0), NothingToRepair);
}

TEST(PlanRepair, TemperatureSchedule) {
  EXPECT_DOUBLE_EQ(temperature_for_round(0), 0.7);
  EXPECT_NEAR(temperature_for_round(3), 1.0, 1e-12);
  const auto g = pipeline();
  EXPECT_NEAR(plan_repair(g, attribution::localize_faults(g), 3).temperature, 1.0, 1e-12);
}

TEST(SelectFeedback, ByTagAndStationarity) {
  graph::CigNode n;
  n.agent = "coder";
  n.error_tag = graph::ErrorTag::kFactual;
  EXPECT_EQ(select_feedback(n, {}).kind, FeedbackKind::kCorrective);
  n.error_tag = graph::ErrorTag::kArithmetic;
  EXPECT_EQ(select_feedback(n, {}).kind, FeedbackKind::kCorrective);
  n.error_tag = graph::ErrorTag::kStrategy;
  EXPECT_EQ(select_feedback(n, {}).kind, FeedbackKind::kDirective);
  EXPECT_EQ(select_feedback(n, {"coder"}).kind, FeedbackKind::kDivergence);
  n.error_tag = graph::ErrorTag::kFactual;
  EXPECT_EQ(select_feedback(n, {"coder"}).kind, FeedbackKind::kDivergence);
  EXPECT_EQ(select_feedback(n, {"other"}).kind, FeedbackKind::kCorrective);
}

TEST(RefinementLoop, PerfectRegeneratorFinishesAfterOneRepair) {
  const auto result = run_refinement_loop(pipeline(), {}, [](const RegenerationRequest&) {
    Regeneration r;
    r.validity_score = 1.0;
    r.approved = true;
    return r;
  });
  EXPECT_EQ(result.termination, Termination::kAllValid);
  EXPECT_EQ(result.rounds, 1);
  for (const auto& n : result.graph.nodes) EXPECT_EQ(n.status, NodeStatus::kValid) << n.id;
}

TEST(RefinementLoop, NeverImprovingStopsAtMaxRounds) {
  int calls = 0;
  const auto result = run_refinement_loop(pipeline(), {}, [&](const RegenerationRequest& req) {
    ++calls;
    Regeneration r;
    r.validity_score = req.node.validity_score;
    return r;
  });
  EXPECT_EQ(result.termination, Termination::kMaxRounds);
  EXPECT_EQ(result.rounds, kDefaultMaxRounds);
  EXPECT_EQ(result.log.size(), static_cast<std::size_t>(kDefaultMaxRounds + 1));
  EXPECT_EQ(calls, 3 * kDefaultMaxRounds);
}

TEST(RefinementLoop, TemperatureRisesPerRound) {
  std::vector<double> temps;
  run_refinement_loop(pipeline(), {}, [&](const RegenerationRequest& req) {
    if (req.node.id == "coder") temps.push_back(req.temperature);
    Regeneration r;
    r.validity_score = req.node.validity_score;
    return r;
  });
  ASSERT_EQ(temps.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(temps[i], 0.7 + 0.1 * i, 1e-12);
}

TEST(RefinementLoop, RootOnlyFixerOnThreeFaultChain) {
  const auto result = run_refinement_loop(failing_chain(3), {}, [](const RegenerationRequest& req) {
    Regeneration r;
    r.validity_score = req.feedback ? 1.0 : req.node.validity_score;
    return r;
  });
  EXPECT_EQ(result.termination, Termination::kAllValid);
  EXPECT_LE(result.rounds, 3);
  EXPECT_EQ(result.rounds, 3);
  EXPECT_EQ(result.log[1].report.root_causes, std::set<NodeId>{"c1"});
}

TEST(RefinementLoop, StationaryAgentWithoutImprovementStops) {
  const auto result = run_refinement_loop(pipeline(), {}, [](const RegenerationRequest& req) {
    Regeneration r;
    r.validity_score = req.node.validity_score;
    r.approved = req.node.approved;
    r.similarity_to_prev = 0.99;
    return r;
  });
  EXPECT_EQ(result.termination, Termination::kStationary);
  EXPECT_EQ(result.rounds, 1);
  EXPECT_TRUE(result.log[1].report.stationary_agents.contains("coder"));
}

TEST(RefinementLoop, StationaryAgentGetsDivergenceWhileImproving) {
  const auto result = run_refinement_loop(pipeline(), {}, [](const RegenerationRequest& req) {
    Regeneration r;
    r.validity_score = req.round == 0 && req.node.id == "aggregator" ? 0.9 : req.node.validity_score;
    r.approved = req.node.approved;
    r.similarity_to_prev = 0.99;
    return r;
  });
  ASSERT_GE(result.log.size(), 2u);
  ASSERT_TRUE(result.log[1].plan.has_value());
  EXPECT_EQ(result.log[1].plan->feedback.at("coder").kind, FeedbackKind::kDivergence);
}

TEST(RefinementLoop, FrozenNodesNeverChange) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const auto g = oracle::random_cig(rng, 12, 0.25);
    const auto result = run_refinement_loop(g, {}, [&](const RegenerationRequest&) {
      Regeneration r;
      r.validity_score = std::round(u(rng) * 20.0) / 20.0;
      r.approved = u(rng) < 0.5;
      return r;
    });
    for (const auto& rec : result.log) {
      if (!rec.plan) continue;
      EXPECT_EQ(rec.frozen_before, rec.frozen_after);
    }
    EXPECT_LE(result.rounds, kDefaultMaxRounds);
  }
}

TEST(RefinementLoop, BoundedForAnyMaxRounds) {
  for (int max_rounds = 0; max_rounds <= 7; ++max_rounds) {
    const auto result = run_refinement_loop(
        failing_chain(10), {}, [](const RegenerationRequest&) { return keep(0.1); }, max_rounds);
    EXPECT_LE(result.rounds, max_rounds);
    EXPECT_EQ(result.log.size(), static_cast<std::size_t>(result.rounds + 1));
  }
}

TEST(RefinementLoop, RegeneratorFailureCarriesContext) {
  try {
    run_refinement_loop(pipeline(), {}, [](const RegenerationRequest& req) -> Regeneration {
      if (req.round == 1) throw std::runtime_error("model offline");
      return keep(req.node.validity_score);
    });
    FAIL() << "expected RegeneratorFailure";
  } catch (const RegeneratorFailure& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("round 1"), std::string::npos) << what;
    EXPECT_NE(what.find("coder"), std::string::npos) << what;
    EXPECT_NE(what.find("model offline"), std::string::npos) << what;
  }
}

TEST(RefinementLoop, RoundLogSerializes) {
  const auto result = run_refinement_loop(pipeline(), {}, [](const RegenerationRequest&) {
    Regeneration r;
    r.validity_score = 1.0;
    return r;
  });
  const auto j = to_json(result.log[0]);
  EXPECT_EQ(j.at("round"), 0);
  EXPECT_TRUE(j.contains("plan"));
}

TEST(RepairCost, RootGivesNoSavings) {
  for (int D = 1; D <= 12; ++D) {
    const auto c = repair_cost(1, D);
    EXPECT_EQ(c.surgical, c.global);
    EXPECT_DOUBLE_EQ(c.savings, 0.0);
  }
}

TEST(RepairCost, LeafAtDepthTen) {
  const auto c = repair_cost(10, 10);
  EXPECT_EQ(c.surgical, 1u);
  EXPECT_EQ(c.global, 1023u);
  EXPECT_GT(c.savings, 0.99);
}

TEST(RepairCost, MatchesSubtreeEnumeration) {
  for (int D = 1; D <= 8; ++D) {
    const auto tree = complete_binary_tree(D);
    const int n = (1 << D) - 1;
    for (int d = 1; d <= D; ++d) {
      const int first = 1 << (d - 1);
      const auto subtree = oracle::heap_subtree(first, n);
      const auto c = repair_cost(d, D);
      EXPECT_EQ(c.surgical, subtree.size()) << "D=" << D << " d=" << d;
      EXPECT_EQ(c.global, static_cast<std::uint64_t>(n));
      const auto measured = repair_cost(tree, "n" + std::to_string(first));
      EXPECT_EQ(measured.surgical, c.surgical);
      EXPECT_DOUBLE_EQ(measured.savings, c.savings);
    }
  }
}

TEST(RepairCost, DepthTwoOfFour) {
  const auto c = repair_cost(2, 4);
  EXPECT_EQ(c.surgical, 7u);
  EXPECT_EQ(c.global, 15u);
  EXPECT_NEAR(c.savings, 8.0 / 15.0, 1e-12);
}

TEST(RepairCost, SavingsNonDecreasingInDepth) {
  for (int D = 1; D <= 30; ++D) {
    double prev = -1.0;
    for (int d = 1; d <= D; ++d) {
      const double s = repair_cost(d, D).savings;
      EXPECT_GE(s, prev);
      prev = s;
    }
  }
}

TEST(RepairCost, DepthOutOfRange) {
  EXPECT_THROW(repair_cost(0, 4), DepthOutOfRange);
  EXPECT_THROW(repair_cost(5, 4), DepthOutOfRange);
  EXPECT_THROW(repair_cost(1, 0), DepthOutOfRange);
}

}  // namespace
}  // namespace trust::refinement
