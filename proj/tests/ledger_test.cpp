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

#include "trust/ledger.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "trust/committee.hpp"
#include "trust/content_store.hpp"
#include "trust/errors.hpp"
#include "trust/graph_io.hpp"
#include "trust/ledger_io.hpp"
#include "trust/merkle.hpp"

namespace trust::ledger {
namespace {

using nlohmann::json;

Digest salt_for(const std::string& tag) { return sha256("salt:" + tag); }

Digest hex(std::string_view h) { return digest_from_hex(h); }

Digest bytes_from(std::uint8_t start) {
  Digest d{};
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<std::uint8_t>(start + i);
  return d;
}

Committee members(std::initializer_list<std::pair<const char*, double>> seats) {
  Committee c;
  for (auto [id, stake] : seats) c.push_back({id, stake});
  return c;
}

graph::ReasoningGraph two_node_graph() {
  graph::ReasoningGraph g;
  g.nodes.resize(2);
  g.nodes[0].id = "s0";
  g.nodes[0].level = graph::Level::kGoal;
  g.nodes[1].id = "s1";
  g.nodes[1].level = graph::Level::kOperation;
  for (auto& n : g.nodes) n.tier = graph::assign_tier(n);
  g.edges.push_back({"s0", "s1", graph::EdgeKind::kDecomposesTo});
  g.goal_id = "s0";
  g.answer_id = "s1";
  return g;
}

// Drives one segment through commit, reveal and finalize. Seats absent from
// `votes` never commit.
bool run_segment(Ledger& l, std::uint64_t s, std::uint64_t seg, const std::map<SeatId, bool>& votes,
                 double tau = 0.66) {
  for (const auto& [seat, v] : votes) {
    l.commit_vote(s, seg, seat, make_commitment(v, salt_for(seat + std::to_string(seg))));
  }
  l.close_commit(s, seg);
  for (const auto& [seat, v] : votes) l.reveal_vote(s, seg, seat, v, salt_for(seat + std::to_string(seg)));
  return l.finalize_segment(s, seg, tau);
}

bool contains_key(const json& j, const std::string& key) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k == key || contains_key(v, key)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (contains_key(v, key)) return true;
    }
  }
  return false;
}

double signed_amount(const Event& e) {
  const double a = e.payload.at("amount").get<double>();
  return e.kind == EventKind::kAuditorSlashed ? -a : a;
}

TEST(Commitment, GoldenValues) {
  const Digest zero{};
  EXPECT_EQ(to_hex(make_commitment(true, zero)),
            "1a7dfdeaffeedac489287e85be5e9c049a2ff6470f55cf30260f55395ac1b159");
  EXPECT_EQ(to_hex(make_commitment(false, zero)),
            "7f9c9e31ac8256ca2f258583df262dbc7d6f68f2a03043d5c99a4ae5a7396ce9");
}

TEST(Commitment, BindingOverVoteDomain) {
  for (int i = 0; i < 200; ++i) {
    const Digest salt = salt_for(std::to_string(i));
    EXPECT_NE(make_commitment(true, salt), make_commitment(false, salt));
  }
}

TEST(Sha256, KnownAnswer) {
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Merkle, GoldenValues) {
  const Digest a = bytes_from(0);
  const Digest b = bytes_from(32);
  Digest c;
  c.fill(0xff);
  EXPECT_EQ(to_hex(merkle_leaf(a)), "699cacdb4c39d8e0bb1223352765a7f7acdc51dec6694f7b54c3d0a47f0cc409");
  const std::vector<Digest> one{a};
  EXPECT_EQ(merkle_root(one), merkle_leaf(a));
  const std::vector<Digest> two{a, b};
  EXPECT_EQ(to_hex(merkle_root(two)), "8e9bd8dc69d64fab1bb196d042c59cfd1dfb8de6b6eedfc42b3e217d67908b2c");
  EXPECT_EQ(merkle_root(two), merkle_node(merkle_leaf(a), merkle_leaf(b)));
  const std::vector<Digest> three{a, b, c};
  EXPECT_EQ(to_hex(merkle_root(three)), "825a2ce5aa78677bf926863817fce59ba815c2f701dbe138ebc621b0cb990bc6");
}

TEST(Merkle, EveryPositionMatters) {
  std::vector<Digest> ds;
  for (int i = 0; i < 8; ++i) ds.push_back(sha256("segment " + std::to_string(i)));
  const Digest root = merkle_root(ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto changed = ds;
    changed[i][0] ^= 1;
    EXPECT_NE(merkle_root(changed), root) << i;
  }
  EXPECT_EQ(merkle_root(ds), root);
}

TEST(Merkle, EmptyList) { EXPECT_THROW(merkle_root(std::span<const Digest>{}), EmptyList); }

TEST(SelectCommittee, ZeroStakeExcluded) {
  const std::vector<SeatInfo> seats{{"heavy", 1.0}, {"empty", 0.0}};
  for (int i = 0; i < 100; ++i) {
    const auto c = select_committee(seats, graph::Tier::kHuman, 1, sha256(std::to_string(i)));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].seat, "heavy");
  }
  EXPECT_THROW(select_committee(seats, graph::Tier::kHuman, 2, Digest{}), InsufficientSeats);
}

TEST(SelectCommittee, FullSetAndFilters) {
  const std::vector<SeatInfo> seats{{"a", 2.0},
                                    {"b", 2.0},
                                    {"c", 2.0},
                                    {"llm", 2.0, graph::Tier::kLlm},
                                    {"away", 2.0, graph::Tier::kHuman, false}};
  const auto c = select_committee(seats, graph::Tier::kHuman, 3, sha256("x"));
  std::set<SeatId> ids;
  for (const auto& m : c) ids.insert(m.seat);
  EXPECT_EQ(ids, (std::set<SeatId>{"a", "b", "c"}));
  EXPECT_THROW(select_committee(seats, graph::Tier::kHuman, 4, sha256("x")), InsufficientSeats);
  EXPECT_THROW(select_committee(seats, graph::Tier::kHuman, 0, sha256("x")), InvalidArgument);
}

TEST(SelectCommittee, DeterministicAndDistinct) {
  std::vector<SeatInfo> seats;
  for (int i = 0; i < 30; ++i) seats.push_back({"seat" + std::to_string(i), 1.0 + i % 5});
  for (int t = 0; t < 50; ++t) {
    const Digest seed = sha256("seed" + std::to_string(t));
    const auto a = select_committee(seats, graph::Tier::kHuman, 7, seed);
    EXPECT_EQ(a, select_committee(seats, graph::Tier::kHuman, 7, seed));
    std::set<SeatId> ids;
    for (const auto& m : a) ids.insert(m.seat);
    EXPECT_EQ(ids.size(), 7u);
  }
}

TEST(SelectCommittee, StakeProportionalFrequency) {
  const std::vector<SeatInfo> seats{{"heavy", 3.0}, {"light", 1.0}};
  int heavy = 0;
  constexpr int kSeeds = 100000;
  for (int i = 0; i < kSeeds; ++i) {
    Sha256 h;
    h.update("committee-frequency").update_u64(static_cast<std::uint64_t>(i));
    if (select_committee(seats, graph::Tier::kHuman, 1, h.finish())[0].seat == "heavy") ++heavy;
  }
  EXPECT_NEAR(static_cast<double>(heavy) / kSeeds, 0.75, 0.01);
}

TEST(LedgerCommit, StoresAndSequences) {
  Ledger l;
  const auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 1}})}}, sha256("seed"));
  EXPECT_EQ(s, 1u);
  const auto& e1 = l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a")));
  EXPECT_EQ(e1.kind, EventKind::kVoteCommitted);
  const auto seq1 = e1.seq;
  const auto seq2 = l.commit_vote(s, 0, "b", make_commitment(true, salt_for("b"))).seq;
  EXPECT_EQ(seq2, seq1 + 1);
  EXPECT_EQ(l.session(s).segments[0].commitments.size(), 2u);
  EXPECT_THROW(l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a"))), DuplicateCommit);
  EXPECT_THROW(l.commit_vote(s, 0, "mallory", Digest{}), NotInCommittee);
  l.close_commit(s, 0);
  EXPECT_THROW(l.commit_vote(s, 0, "b", Digest{}), WrongPhase);
  EXPECT_THROW(l.close_commit(s, 0), WrongPhase);
}

TEST(LedgerReveal, MatchingAndMismatching) {
  Ledger l;
  const auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 1}, {"c", 1}})}}, Digest{});
  l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a")));
  l.commit_vote(s, 0, "b", make_commitment(false, salt_for("b")));
  EXPECT_THROW(l.reveal_vote(s, 0, "a", true, salt_for("a")), WrongPhase);
  l.close_commit(s, 0);
  EXPECT_THROW(l.reveal_vote(s, 0, "a", false, salt_for("a")), HashMismatch);
  EXPECT_THROW(l.reveal_vote(s, 0, "b", false, salt_for("a")), HashMismatch);
  EXPECT_THROW(l.reveal_vote(s, 0, "c", true, salt_for("c")), NoCommitment);
  EXPECT_THROW(l.reveal_vote(s, 0, "z", true, salt_for("z")), NotInCommittee);
  EXPECT_EQ(l.reveal_vote(s, 0, "a", true, salt_for("a")).kind, EventKind::kVoteRevealed);
  EXPECT_THROW(l.reveal_vote(s, 0, "a", true, salt_for("a")), WrongPhase);
  EXPECT_TRUE(l.session(s).segments[0].reveals.at("a").vote);
}

TEST(LedgerHiding, NoVoteBitsBeforeReveal) {
  Ledger l;
  const auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 1}})}}, Digest{});
  l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a")));
  l.commit_vote(s, 0, "b", make_commitment(false, salt_for("b")));
  l.close_commit(s, 0);
  const json state = to_json(l.session(s));
  EXPECT_FALSE(contains_key(state, "vote"));
  EXPECT_FALSE(contains_key(state, "salt"));
  for (const auto& e : l.events()) EXPECT_FALSE(contains_key(to_json(e), "vote"));
  l.reveal_vote(s, 0, "a", true, salt_for("a"));
  EXPECT_TRUE(contains_key(to_json(l.session(s)), "vote"));
}

TEST(LedgerFinalize, StakeWeightedExamples) {
  Ledger l;
  auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 1}, {"c", 1}})}}, Digest{});
  EXPECT_TRUE(run_segment(l, s, 0, {{"a", true}, {"b", true}, {"c", false}}));
  EXPECT_NEAR(l.session(s).segments[0].pass_weight, 2.0 / 3.0, 1e-12);
  EXPECT_THROW(l.finalize_segment(s, 0, 0.66), AlreadyFinalized);

  s = l.create_session(Digest{}, {{"s0", members({{"a", 9}, {"b", 1}})}}, Digest{});
  EXPECT_TRUE(run_segment(l, s, 0, {{"a", true}, {"b", false}}));
  EXPECT_NEAR(l.session(s).segments[0].pass_weight, 0.9, 1e-12);

  s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 9}})}}, Digest{});
  EXPECT_FALSE(run_segment(l, s, 0, {{"a", true}, {"b", false}}));
}

TEST(LedgerFinalize, NobodyRevealsAndEverySeatIsSlashed) {
  Ledger l;
  const auto s = l.create_session(Digest{}, {{"s1", members({{"a", 1}, {"b", 1}, {"c", 1}})}}, Digest{});
  l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a")));
  l.close_commit(s, 0);
  EXPECT_FALSE(l.finalize_segment(s, 0, 0.66));
  EXPECT_EQ(l.session(s).segments[0].non_revealers, (std::vector<SeatId>{"a", "b", "c"}));
  auto g = two_node_graph();
  g.nodes.erase(g.nodes.begin());
  g.edges.clear();
  g.goal_id = "s1";
  l.finalize_trace(s, g);
  const auto events = l.settle(s, econ::EconomicParams{});
  ASSERT_EQ(events.size(), 3u);
  for (const auto& e : events) {
    EXPECT_EQ(e.kind, EventKind::kAuditorSlashed);
    EXPECT_EQ(e.payload.at("reason"), "NonReveal");
    EXPECT_DOUBLE_EQ(e.payload.at("amount").get<double>(), 8.0);
  }
}

TEST(LedgerFinalize, DeterministicGivenReveals) {
  for (int t = 0; t < 20; ++t) {
    Ledger a;
    Ledger b;
    std::mt19937_64 rng(t);
    Committee c;
    std::map<SeatId, bool> votes;
    for (int i = 0; i < 7; ++i) {
      const SeatId id = "s" + std::to_string(i);
      c.push_back({id, 1.0 + static_cast<double>(rng() % 10)});
      votes[id] = rng() % 2 == 0;
    }
    const auto sa = a.create_session(Digest{}, {{"n", c}}, Digest{});
    const auto sb = b.create_session(Digest{}, {{"n", c}}, Digest{});
    EXPECT_EQ(run_segment(a, sa, 0, votes), run_segment(b, sb, 0, votes));
    EXPECT_EQ(a.state_digest(), b.state_digest());
    double pass = 0.0, total = 0.0;
    for (const auto& m : c) {
      total += m.stake;
      if (votes.at(m.seat)) pass += m.stake;
    }
    EXPECT_EQ(a.session(sa).segments[0].verdict, pass / total >= 0.66);
  }
}

class TraceSession : public ::testing::Test {
 protected:
  std::uint64_t open(bool s0_pass) {
    s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 1}})}, {"s1", members({{"a", 1}, {"b", 1}})}},
                         sha256("trace"));
    run_segment(l, s, 0, {{"a", s0_pass}, {"b", s0_pass}});
    return s;
  }
  Ledger l;
  std::uint64_t s = 0;
};

TEST_F(TraceSession, PendingThenValid) {
  open(true);
  EXPECT_THROW(l.finalize_trace(s, two_node_graph()), SegmentsPending);
  run_segment(l, s, 1, {{"a", true}, {"b", true}});
  EXPECT_THROW(l.settle(s, {}), NotFinalized);
  EXPECT_TRUE(l.finalize_trace(s, two_node_graph()));
  EXPECT_EQ(l.session(s).status, SessionStatus::kFinalized);
  EXPECT_THROW(l.finalize_trace(s, two_node_graph()), AlreadyFinalized);
}

TEST_F(TraceSession, CriticalPathFailure) {
  open(true);
  run_segment(l, s, 1, {{"a", false}, {"b", false}});
  EXPECT_FALSE(l.finalize_trace(s, two_node_graph()));
}

TEST_F(TraceSession, OffPathFailureOnly) {
  s = l.create_session(Digest{}, {{"s0", members({{"a", 1}})}, {"s1", members({{"a", 1}})}, {"s2", members({{"a", 1}})}},
                       Digest{});
  run_segment(l, s, 0, {{"a", true}});
  run_segment(l, s, 1, {{"a", true}});
  run_segment(l, s, 2, {{"a", false}});
  auto g = two_node_graph();
  graph::HdagNode side;
  side.id = "s2";
  side.level = graph::Level::kOperation;
  side.tier = graph::assign_tier(side);
  g.nodes.push_back(side);
  g.edges.push_back({"s0", "s2", graph::EdgeKind::kDecomposesTo});
  EXPECT_TRUE(l.finalize_trace(s, g));
}

TEST_F(TraceSession, AllAlignedSettlesRewardsOnly) {
  open(true);
  run_segment(l, s, 1, {{"a", true}, {"b", true}});
  l.finalize_trace(s, two_node_graph());
  const auto events = l.settle(s, econ::EconomicParams{});
  ASSERT_EQ(events.size(), 4u);
  for (const auto& e : events) {
    EXPECT_EQ(e.kind, EventKind::kRewardPaid);
    EXPECT_DOUBLE_EQ(e.payload.at("amount").get<double>(), 6.0);
  }
  EXPECT_DOUBLE_EQ(l.seats().at("a").cumulative_payoff, 12.0);
  EXPECT_NEAR(l.seats().at("a").reputation, 0.595, 1e-12);
  EXPECT_THROW(l.settle(s, econ::EconomicParams{}), AlreadySettled);
}

TEST(LedgerSettle, MisalignedAtZeroReputationWithCertainSlash) {
  Ledger l({{"bad", econ::SeatState{0.0, 1.0, 0.0, true}}});
  const auto s = l.create_session(Digest{}, {{"s1", members({{"good", 9}, {"bad", 1}})}}, sha256("x"));
  run_segment(l, s, 0, {{"good", true}, {"bad", false}});
  auto g = two_node_graph();
  g.nodes.erase(g.nodes.begin());
  g.edges.clear();
  g.goal_id = "s1";
  l.finalize_trace(s, g);
  econ::EconomicParams ep;
  ep.p_max = 1.0;
  const auto events = l.settle(s, ep);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].kind, EventKind::kAuditorSlashed);
  EXPECT_EQ(events[1].payload.at("reason"), "Misaligned");
  EXPECT_DOUBLE_EQ(l.seats().at("bad").cumulative_payoff, -8.0);
}

TEST(LedgerSettle, UnknownSessionAndSegment) {
  Ledger l;
  EXPECT_THROW(l.session(9), InvalidArgument);
  const auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}})}}, Digest{});
  EXPECT_THROW(l.close_commit(s, 4), InvalidArgument);
  EXPECT_THROW(l.create_session(Digest{}, {}, Digest{}), InvalidArgument);
  EXPECT_THROW(l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"a", 1}})}}, Digest{}), InvalidArgument);
}

// Honest seats err with probability eps; a heavy anchor seat always votes
// pass, so consensus is the truth.
struct HonestRun {
  Ledger ledger;
  std::uint64_t session = 0;
  std::map<SeatId, std::vector<bool>> correct;
};

HonestRun honest_session(int seats, int segments, std::uint64_t seed) {
  HonestRun run;
  const econ::EconomicParams ep;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution wrong(ep.epsilon_H);
  Committee c{{"anchor", 10.0 * seats}};
  for (int i = 0; i < seats; ++i) c.push_back({"h" + std::to_string(i), 1.0});
  std::vector<SegmentSpec> specs;
  for (int t = 0; t < segments; ++t) specs.push_back({"seg" + std::to_string(t), c});
  run.session = run.ledger.create_session(Digest{}, specs, sha256("honest-" + std::to_string(seed)));
  graph::ReasoningGraph g;
  for (int t = 0; t < segments; ++t) {
    std::map<SeatId, bool> votes{{"anchor", true}};
    for (int i = 1; i <= seats; ++i) {
      const bool v = !wrong(rng);
      votes[c[i].seat] = v;
      run.correct[c[i].seat].push_back(v);
    }
    EXPECT_TRUE(run_segment(run.ledger, run.session, t, votes));
    graph::HdagNode n;
    n.id = specs[t].node;
    n.level = t == 0 ? graph::Level::kGoal : graph::Level::kOperation;
    n.tier = graph::assign_tier(n);
    g.nodes.push_back(n);
    if (t > 0) g.edges.push_back({specs[0].node, n.id, graph::EdgeKind::kDecomposesTo});
  }
  g.goal_id = specs[0].node;
  g.answer_id = specs[1].node;
  run.ledger.finalize_trace(run.session, g);
  run.ledger.settle(run.session, ep);
  return run;
}

TEST(LedgerSettle, ConservationInEventLog) {
  auto run = honest_session(20, 10, 3);
  double from_events = 0.0;
  for (const auto& e : run.ledger.session(run.session).events) {
    if (e.kind == EventKind::kRewardPaid || e.kind == EventKind::kAuditorSlashed) from_events += signed_amount(e);
  }
  double from_seats = 0.0;
  for (const auto& [id, st] : run.ledger.seats()) from_seats += st.cumulative_payoff;
  EXPECT_NEAR(from_events, from_seats, 1e-9);
}

TEST(LedgerSettle, DeterministicGivenSeed) {
  const auto a = honest_session(10, 10, 4);
  const auto b = honest_session(10, 10, 4);
  EXPECT_EQ(a.ledger.state_digest(), b.ledger.state_digest());
  EXPECT_EQ(a.ledger.events(), b.ledger.events());
}

TEST(LedgerSettle, HundredSegmentHonestMean) {
  constexpr int kSeats = 200;
  constexpr int kSegments = 100;
  const auto run = honest_session(kSeats, kSegments, 5);
  const econ::EconomicParams ep;
  // Reputation path and expected payoff recomputed from the vote record.
  double sum = 0.0, sum_sq = 0.0, rbar = 0.0;
  for (const auto& [seat, outcomes] : run.correct) {
    double r = 0.5;
    for (bool ok : outcomes) {
      rbar += r;
      r = (1.0 - ep.gamma) * r + ep.gamma * (ok ? 1.0 : 0.0);
    }
    const double payoff = run.ledger.seats().at(seat).cumulative_payoff;
    EXPECT_NEAR(run.ledger.seats().at(seat).reputation, r, 1e-12);
    sum += payoff;
    sum_sq += payoff * payoff;
  }
  rbar /= static_cast<double>(kSeats) * kSegments;
  const double mean = sum / kSeats;
  const double se = std::sqrt((sum_sq / kSeats - mean * mean) / kSeats);
  const double p_slash = ep.p_min + (ep.p_max - ep.p_min) * (1.0 - rbar);
  const double expected = kSegments * ((1.0 - ep.epsilon_H) * ep.R - ep.epsilon_H * ep.P * p_slash);
  EXPECT_NEAR(mean, expected, 3.0 * se) << "se " << se;
}

TEST(LedgerReplay, ReproducesStateDigest) {
  auto run = honest_session(8, 6, 6);
  const auto& events = run.ledger.events();
  const auto rebuilt = Ledger::replay(events);
  EXPECT_EQ(rebuilt.state_digest(), run.ledger.state_digest());
  EXPECT_EQ(rebuilt.state_digest(run.session), run.ledger.state_digest(run.session));
  std::stringstream io;
  write_events_jsonl(io, events);
  const auto parsed = read_events_jsonl(io);
  EXPECT_EQ(parsed, events);
  EXPECT_EQ(Ledger::replay(parsed).state_digest(), run.ledger.state_digest());
}

TEST(LedgerReplay, PrefixReplayMatchesIntermediateState) {
  Ledger l;
  const auto s = l.create_session(Digest{}, {{"s0", members({{"a", 1}, {"b", 2}})}}, sha256("p"));
  l.commit_vote(s, 0, "a", make_commitment(true, salt_for("a")));
  const Digest mid = l.state_digest();
  const std::size_t n = l.events().size();
  l.commit_vote(s, 0, "b", make_commitment(true, salt_for("b")));
  EXPECT_EQ(Ledger::replay(std::span(l.events()).first(n)).state_digest(), mid);
  EXPECT_NE(l.state_digest(), mid);
}

TEST(SessionScript, RunsFixture) {
  std::ifstream in(TRUST_TEST_DATA "/session_script.jsonl");
  auto result = run_session_script(in, TRUST_TEST_DATA);
  const auto& l = result.ledger;
  const auto& s = l.session(1);
  EXPECT_EQ(s.status, SessionStatus::kFinalized);
  EXPECT_TRUE(s.settled);
  EXPECT_EQ(s.trace_valid, std::optional<bool>(true));
  EXPECT_EQ(s.segments[1].non_revealers, std::vector<SeatId>{"carol"});
  std::size_t expected_errors = 0;
  for (const auto& step : result.steps) {
    if (step.error) ++expected_errors;
  }
  EXPECT_EQ(expected_errors, 2u);
  EXPECT_EQ(to_hex(s.trace_root),
            to_hex(merkle_root(std::vector<Digest>{
                hex("8dacc3c93ec64b3033f1390f957322f3bce41113b683e7214ee2672d271cea6e"),
                hex("a998317e4eeb8beb830519a85f6411369ad39742d350e7a001375b4d421c101d")})));
  bool carol_nonreveal = false;
  for (const auto& e : s.events) {
    if (e.kind == EventKind::kAuditorSlashed && e.payload.at("seat") == "carol" && e.payload.at("reason") == "NonReveal") {
      carol_nonreveal = true;
    }
  }
  EXPECT_TRUE(carol_nonreveal);
  EXPECT_DOUBLE_EQ(l.seats().at("alice").cumulative_payoff, 12.0);
  EXPECT_EQ(Ledger::replay(l.events(), result.initial_seats).state_digest(), l.state_digest());
}

TEST(SessionScript, UnexpectedErrorCarriesLine) {
  std::istringstream in(
      "{\"action\": \"create_session\", \"seed_text\": \"x\", \"segments\": [{\"node\": \"a\", \"committee\": "
      "[{\"seat\": \"s\", \"stake\": 1}]}]}\n"
      "{\"action\": \"close_commit\", \"session\": 1, \"segment\": 0}\n"
      "{\"action\": \"close_commit\", \"session\": 1, \"segment\": 0}\n");
  try {
    run_session_script(in);
    FAIL() << "expected WrongPhase";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongPhase);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(SessionScript, MismatchedExpectation) {
  std::istringstream in(
      "{\"action\": \"create_session\", \"seed_text\": \"x\", \"segments\": [{\"node\": \"a\", \"committee\": "
      "[{\"seat\": \"s\", \"stake\": 1}]}]}\n"
      "{\"action\": \"close_commit\", \"session\": 1, \"segment\": 0, \"expect_error\": \"HashMismatch\"}\n");
  EXPECT_THROW(run_session_script(in), InvalidArgument);
}

TEST(ContentStore, GrantCoversNodeAndParents) {
  const auto g = graph::reasoning_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/integration_hdag.json"));
  ContentStore store(sha256("master"));
  EXPECT_EQ(store.grant_access("seat", "v9", g).size(), 4u);
  EXPECT_EQ(grant_access(store, "goal-seat", "v0", g).size(), 1u);
  EXPECT_EQ(store.grant_access("two", "v7", g).size(), 3u);
  EXPECT_THROW(store.grant_access("seat", "nope", g), UnknownNode);
}

TEST(ContentStore, OpenableSetEqualsGrantsAndParents) {
  const auto g = graph::reasoning_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/integration_hdag.json"));
  std::mt19937_64 rng(61);
  for (int t = 0; t < 30; ++t) {
    ContentStore store(sha256("master" + std::to_string(t)));
    std::map<graph::NodeId, Digest> ids;
    for (const auto& n : g.nodes) {
      const std::string body = "content of " + n.id + " #" + std::to_string(t);
      ids[n.id] = store.put(n.id, std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
    }
    std::set<graph::NodeId> expected;
    const int grants = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < grants; ++i) {
      const auto& node = g.nodes[rng() % g.nodes.size()].id;
      store.grant_access("seat", node, g);
      expected.insert(node);
      for (const auto& e : g.edges) {
        if (e.to == node) expected.insert(e.from);
      }
    }
    std::set<graph::NodeId> openable;
    for (const auto& [node, cid] : ids) {
      if (store.open("seat", cid)) openable.insert(node);
      EXPECT_FALSE(store.open("stranger", cid));
    }
    EXPECT_EQ(openable, expected);
    EXPECT_EQ(store.keyed_nodes("seat"), expected);
  }
}

TEST(ContentStore, SingleGrantCannotReconstructGraph) {
  const auto g = graph::reasoning_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/integration_hdag.json"));
  for (const auto& n : g.nodes) {
    ContentStore store(sha256("m"));
    for (const auto& m : g.nodes) store.put(m.id, std::vector<std::uint8_t>(m.id.begin(), m.id.end()));
    store.grant_access("seat", n.id, g);
    EXPECT_LT(store.keyed_nodes("seat").size(), g.nodes.size()) << n.id;
  }
}

TEST(ContentStore, OpenReturnsStoredBytes) {
  ContentStore store(sha256("m"));
  const std::vector<std::uint8_t> body{1, 2, 3};
  const Digest cid = store.put("v0", body);
  EXPECT_EQ(cid, sha256(body));
  auto g = two_node_graph();
  store.grant_access("seat", "s0", g);
  EXPECT_FALSE(store.open("seat", cid).has_value());
  const auto g2 = graph::reasoning_graph_from_json(graph::read_json_file(TRUST_TEST_DATA "/integration_hdag.json"));
  store.grant_access("seat", "v1", g2);
  EXPECT_EQ(store.open("seat", cid), body);
  EXPECT_FALSE(store.open("seat", sha256("missing")).has_value());
}

}  // namespace
}  // namespace trust::ledger
