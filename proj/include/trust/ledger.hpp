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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "trust/attribution.hpp"
#include "trust/committee.hpp"
#include "trust/digest.hpp"
#include "trust/economics.hpp"
#include "trust/graph.hpp"

namespace trust::ledger {

/// Commitment to a binary vote: SHA-256(vote byte || 32-byte salt), with the
/// vote byte 0x01 for pass and 0x00 for fail.
Digest make_commitment(bool vote, const Digest& salt);

enum class Phase { kCommit, kReveal, kDone };
enum class SessionStatus { kOpen, kFinalized };
enum class SlashReason { kNonReveal, kMisaligned, kHoneypot };

enum class EventKind {
  kSessionCreated,
  kVoteCommitted,
  kPhaseAdvanced,
  kVoteRevealed,
  kSegmentFinalized,
  kTraceFinalized,
  kAuditorSlashed,
  kRewardPaid,
};

struct Event {
  std::uint64_t session = 0;
  std::uint64_t seq = 0;  // position within the session's log
  EventKind kind = EventKind::kSessionCreated;
  nlohmann::json payload;

  bool operator==(const Event&) const = default;
};

struct RevealedVote {
  bool vote = false;
  Digest salt{};
};

struct SegmentRecord {
  std::uint64_t segment_id = 0;
  graph::NodeId node;
  Committee committee;
  std::map<SeatId, Digest> commitments;
  std::map<SeatId, RevealedVote> reveals;
  std::optional<bool> verdict;
  Phase phase = Phase::kCommit;
  double pass_weight = 0.0;
  std::vector<SeatId> non_revealers;
};

struct AuditSession {
  std::uint64_t session_id = 0;
  Digest trace_root{};
  Digest seed{};
  std::vector<SegmentRecord> segments;
  SessionStatus status = SessionStatus::kOpen;
  std::optional<bool> trace_valid;
  bool settled = false;
  std::vector<Event> events;
};

struct SegmentSpec {
  graph::NodeId node;
  Committee committee;
};

/// In-process audit ledger. Every state change is expressed as an Event and
/// applied through a single transition function, so replaying the event log
/// rebuilds identical state.
class Ledger {
 public:
  Ledger() = default;
  explicit Ledger(std::map<SeatId, econ::SeatState> seats) : seats_(std::move(seats)) {}

  std::uint64_t create_session(const Digest& trace_root, std::vector<SegmentSpec> segments,
                               const Digest& seed);

  /// Errors: WrongPhase, NotInCommittee, DuplicateCommit.
  const Event& commit_vote(std::uint64_t session, std::uint64_t segment, const SeatId& seat,
                           const Digest& commitment);
  /// Ends the commit window of a segment. Errors: WrongPhase.
  const Event& close_commit(std::uint64_t session, std::uint64_t segment);
  /// Errors: WrongPhase, NotInCommittee, NoCommitment, HashMismatch.
  const Event& reveal_vote(std::uint64_t session, std::uint64_t segment, const SeatId& seat,
                           bool vote, const Digest& salt);
  /// Closes the reveal window and records the stake-weighted verdict.
  /// Errors: AlreadyFinalized, WrongPhase.
  bool finalize_segment(std::uint64_t session, std::uint64_t segment, double tau);
  /// Errors: SegmentsPending, AlreadyFinalized, MissingVerdict.
  bool finalize_trace(std::uint64_t session, const graph::ReasoningGraph& g,
                      const std::set<graph::NodeId>& unresolved_roots = {});
  /// Rewards and slashes per seat per segment. Errors: NotFinalized,
  /// AlreadySettled.
  std::vector<Event> settle(std::uint64_t session, const econ::EconomicParams& ep);

  const AuditSession& session(std::uint64_t id) const;
  std::vector<std::uint64_t> session_ids() const;
  const std::vector<Event>& events() const { return log_; }

  void register_seat(const SeatId& seat, econ::SeatState state);
  const std::map<SeatId, econ::SeatState>& seats() const { return seats_; }

  /// Digest of the canonical serialization of one session.
  Digest state_digest(std::uint64_t session) const;
  /// Digest over all sessions and the seat registry.
  Digest state_digest() const;

  /// Rebuilds a ledger from an event log and the seat registry it started with.
  static Ledger replay(std::span<const Event> events,
                       std::map<SeatId, econ::SeatState> initial_seats = {});

 private:
  AuditSession& mut_session(std::uint64_t id);
  SegmentRecord& mut_segment(std::uint64_t session, std::uint64_t segment);
  const Event& emit(std::uint64_t session, EventKind kind, nlohmann::json payload);
  void apply(const Event& e);

  std::map<std::uint64_t, AuditSession> sessions_;
  std::map<SeatId, econ::SeatState> seats_;
  std::vector<Event> log_;
  std::uint64_t next_session_ = 1;
};

std::string_view to_string(Phase p);
std::string_view to_string(SessionStatus s);
std::string_view to_string(SlashReason r);
std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AuditSession& s);

}  // namespace trust::ledger
