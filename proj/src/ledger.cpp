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

#include <algorithm>

#include "trust/errors.hpp"

namespace trust::ledger {

using nlohmann::json;

namespace {

json committee_json(const Committee& c) {
  json out = json::array();
  for (const auto& m : c) out.push_back({{"seat", m.seat}, {"stake", m.stake}});
  return out;
}

Committee committee_from(const json& j) {
  Committee c;
  for (const auto& m : j) c.push_back({m.at("seat").get<std::string>(), m.at("stake").get<double>()});
  return c;
}

bool in_committee(const SegmentRecord& seg, const SeatId& seat) {
  return std::any_of(seg.committee.begin(), seg.committee.end(),
                     [&](const CommitteeMember& m) { return m.seat == seat; });
}

// Uniform in (0,1) keyed on the session seed and the settlement coordinates.
double settle_uniform(const AuditSession& s, std::uint64_t segment, const SeatId& seat) {
  Sha256 h;
  h.update("settle")
      .update(std::span<const std::uint8_t>(s.seed))
      .update_u64(s.session_id)
      .update_u64(segment)
      .update(seat);
  const std::uint64_t bits = digest_prefix_u64(h.finish()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::string where(std::uint64_t session, std::uint64_t segment) {
  return "session " + std::to_string(session) + ", segment " + std::to_string(segment);
}

}  // namespace

Digest make_commitment(bool vote, const Digest& salt) {
  Sha256 h;
  h.update(static_cast<std::uint8_t>(vote ? 0x01 : 0x00)).update(std::span<const std::uint8_t>(salt));
  return h.finish();
}

AuditSession& Ledger::mut_session(std::uint64_t id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw InvalidArgument("unknown session " + std::to_string(id));
  return it->second;
}

const AuditSession& Ledger::session(std::uint64_t id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw InvalidArgument("unknown session " + std::to_string(id));
  return it->second;
}

std::vector<std::uint64_t> Ledger::session_ids() const {
  std::vector<std::uint64_t> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

SegmentRecord& Ledger::mut_segment(std::uint64_t session, std::uint64_t segment) {
  auto& s = mut_session(session);
  if (segment >= s.segments.size()) {
    throw InvalidArgument("unknown segment: " + where(session, segment));
  }
  return s.segments[segment];
}

void Ledger::register_seat(const SeatId& seat, econ::SeatState state) { seats_[seat] = state; }

const Event& Ledger::emit(std::uint64_t session, EventKind kind, json payload) {
  Event e;
  e.session = session;
  e.kind = kind;
  e.payload = std::move(payload);
  auto it = sessions_.find(session);
  e.seq = it == sessions_.end() ? 0 : it->second.events.size();
  apply(e);
  return sessions_.at(session).events.back();
}

void Ledger::apply(const Event& e) {
  const json& p = e.payload;
  if (e.kind == EventKind::kSessionCreated) {
    if (sessions_.contains(e.session) || e.seq != 0) {
      throw InvalidArgument("session " + std::to_string(e.session) + " already exists");
    }
    AuditSession s;
    s.session_id = e.session;
    s.trace_root = digest_from_hex(p.at("trace_root").get<std::string>());
    s.seed = digest_from_hex(p.at("seed").get<std::string>());
    for (const auto& seg : p.at("segments")) {
      SegmentRecord r;
      r.segment_id = s.segments.size();
      r.node = seg.at("node").get<std::string>();
      r.committee = committee_from(seg.at("committee"));
      s.segments.push_back(std::move(r));
    }
    s.events.push_back(e);
    sessions_.emplace(e.session, std::move(s));
    next_session_ = std::max(next_session_, e.session + 1);
    log_.push_back(e);
    return;
  }

  auto& s = mut_session(e.session);
  if (e.seq != s.events.size()) {
    throw InvalidArgument("event out of order in session " + std::to_string(e.session));
  }
  auto segment = [&]() -> SegmentRecord& {
    return mut_segment(e.session, p.at("segment").get<std::uint64_t>());
  };
  switch (e.kind) {
    case EventKind::kSessionCreated:
      break;
    case EventKind::kVoteCommitted:
      segment().commitments[p.at("seat").get<std::string>()] =
          digest_from_hex(p.at("commitment").get<std::string>());
      break;
    case EventKind::kPhaseAdvanced:
      segment().phase = Phase::kReveal;
      break;
    case EventKind::kVoteRevealed:
      segment().reveals[p.at("seat").get<std::string>()] =
          RevealedVote{p.at("vote").get<bool>(), digest_from_hex(p.at("salt").get<std::string>())};
      break;
    case EventKind::kSegmentFinalized: {
      auto& seg = segment();
      seg.verdict = p.at("verdict").get<bool>();
      seg.pass_weight = p.at("pass_weight").get<double>();
      seg.non_revealers = p.at("non_revealers").get<std::vector<std::string>>();
      seg.phase = Phase::kDone;
      break;
    }
    case EventKind::kTraceFinalized:
      s.trace_valid = p.at("valid").get<bool>();
      s.status = SessionStatus::kFinalized;
      break;
    case EventKind::kAuditorSlashed:
    case EventKind::kRewardPaid: {
      s.settled = true;
      auto& seat = seats_[p.at("seat").get<std::string>()];
      const double amount = p.at("amount").get<double>();
      if (e.kind == EventKind::kAuditorSlashed) {
        seat.stake -= amount;
        seat.cumulative_payoff -= amount;
      } else {
        seat.cumulative_payoff += amount;
      }
      seat.reputation = p.at("reputation").get<double>();
      break;
    }
  }
  s.events.push_back(e);
  log_.push_back(e);
}

std::uint64_t Ledger::create_session(const Digest& trace_root, std::vector<SegmentSpec> segments,
                                     const Digest& seed) {
  if (segments.empty()) throw InvalidArgument("session needs at least one segment");
  json segs = json::array();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& spec = segments[i];
    if (spec.committee.empty()) {
      throw InvalidArgument("segment " + std::to_string(i) + " has an empty committee");
    }
    std::set<SeatId> distinct;
    for (const auto& m : spec.committee) {
      if (!(m.stake > 0.0)) throw InvalidArgument("committee stake must be positive: " + m.seat);
      if (!distinct.insert(m.seat).second) throw InvalidArgument("duplicate committee seat: " + m.seat);
    }
    segs.push_back({{"segment", i}, {"node", spec.node}, {"committee", committee_json(spec.committee)}});
  }
  const std::uint64_t id = next_session_;
  emit(id, EventKind::kSessionCreated,
       {{"session", id}, {"trace_root", to_hex(trace_root)}, {"seed", to_hex(seed)}, {"segments", segs}});
  return id;
}

const Event& Ledger::commit_vote(std::uint64_t session, std::uint64_t segment, const SeatId& seat,
                                 const Digest& commitment) {
  const auto& seg = mut_segment(session, segment);
  if (seg.phase != Phase::kCommit) throw WrongPhase("commit outside commit phase: " + where(session, segment));
  if (!in_committee(seg, seat)) throw NotInCommittee(seat + " not on committee of " + where(session, segment));
  if (seg.commitments.contains(seat)) throw DuplicateCommit(seat + " already committed in " + where(session, segment));
  return emit(session, EventKind::kVoteCommitted,
              {{"segment", segment}, {"seat", seat}, {"commitment", to_hex(commitment)}});
}

const Event& Ledger::close_commit(std::uint64_t session, std::uint64_t segment) {
  const auto& seg = mut_segment(session, segment);
  if (seg.phase != Phase::kCommit) throw WrongPhase("commit window already closed: " + where(session, segment));
  return emit(session, EventKind::kPhaseAdvanced, {{"segment", segment}, {"phase", "reveal"}});
}

const Event& Ledger::reveal_vote(std::uint64_t session, std::uint64_t segment, const SeatId& seat,
                                 bool vote, const Digest& salt) {
  const auto& seg = mut_segment(session, segment);
  if (seg.phase != Phase::kReveal) throw WrongPhase("reveal outside reveal phase: " + where(session, segment));
  if (!in_committee(seg, seat)) throw NotInCommittee(seat + " not on committee of " + where(session, segment));
  auto c = seg.commitments.find(seat);
  if (c == seg.commitments.end()) throw NoCommitment(seat + " has no commitment in " + where(session, segment));
  if (seg.reveals.contains(seat)) throw WrongPhase(seat + " already revealed in " + where(session, segment));
  if (make_commitment(vote, salt) != c->second) {
    throw HashMismatch("reveal does not match commitment for " + seat + " in " + where(session, segment));
  }
  return emit(session, EventKind::kVoteRevealed,
              {{"segment", segment}, {"seat", seat}, {"vote", vote}, {"salt", to_hex(salt)}});
}

bool Ledger::finalize_segment(std::uint64_t session, std::uint64_t segment, double tau) {
  const auto& seg = mut_segment(session, segment);
  if (seg.phase == Phase::kDone) throw AlreadyFinalized("segment already finalized: " + where(session, segment));
  if (seg.phase != Phase::kReveal) throw WrongPhase("reveal window not open: " + where(session, segment));
  double total = 0.0;
  double pass = 0.0;
  std::vector<SeatId> missing;
  for (const auto& m : seg.committee) {
    total += m.stake;
    auto r = seg.reveals.find(m.seat);
    if (r == seg.reveals.end()) {
      missing.push_back(m.seat);
    } else if (r->second.vote) {
      pass += m.stake;
    }
  }
  const double weight = pass / total;
  const bool verdict = weight >= tau;
  emit(session, EventKind::kSegmentFinalized,
       {{"segment", segment},
        {"verdict", verdict},
        {"pass_weight", weight},
        {"tau", tau},
        {"non_revealers", missing}});
  return verdict;
}

bool Ledger::finalize_trace(std::uint64_t session, const graph::ReasoningGraph& g,
                            const std::set<graph::NodeId>& unresolved_roots) {
  const auto& s = mut_session(session);
  if (s.status == SessionStatus::kFinalized) {
    throw AlreadyFinalized("session " + std::to_string(session) + " already finalized");
  }
  std::map<graph::NodeId, bool> verdicts;
  for (const auto& seg : s.segments) {
    if (seg.phase != Phase::kDone) {
      throw SegmentsPending("segment " + std::to_string(seg.segment_id) + " of session " +
                            std::to_string(session) + " not finalized");
    }
    auto [it, fresh] = verdicts.emplace(seg.node, *seg.verdict);
    if (!fresh) it->second = it->second && *seg.verdict;
  }
  const auto validity = attribution::trace_validity(g, verdicts, unresolved_roots);
  json violated = json::array();
  for (auto c : validity.violated) violated.push_back(attribution::to_string(c));
  emit(session, EventKind::kTraceFinalized,
       {{"valid", validity.valid}, {"violated", violated}, {"failed_critical", validity.failed_critical}});
  return validity.valid;
}

std::vector<Event> Ledger::settle(std::uint64_t session, const econ::EconomicParams& ep) {
  ep.validate();
  const auto& s = mut_session(session);
  if (s.status != SessionStatus::kFinalized) {
    throw NotFinalized("session " + std::to_string(session) + " not finalized");
  }
  if (s.settled) throw AlreadySettled("session " + std::to_string(session) + " already settled");
  std::vector<Event> out;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& seg = s.segments[i];
    for (const auto& m : seg.committee) {
      const double r = seats_[m.seat].reputation;
      auto rev = seg.reveals.find(m.seat);
      json p = {{"segment", i}, {"seat", m.seat}};
      if (rev == seg.reveals.end()) {
        p["amount"] = ep.P;
        p["reason"] = to_string(SlashReason::kNonReveal);
        p["reputation"] = econ::update_reputation(r, false, ep.gamma);
        out.push_back(emit(session, EventKind::kAuditorSlashed, std::move(p)));
      } else if (rev->second.vote == *seg.verdict) {
        p["amount"] = ep.R;
        p["reputation"] = econ::update_reputation(r, true, ep.gamma);
        out.push_back(emit(session, EventKind::kRewardPaid, std::move(p)));
      } else {
        p["reputation"] = econ::update_reputation(r, false, ep.gamma);
        if (settle_uniform(s, i, m.seat) < econ::slash_probability(r, ep)) {
          p["amount"] = ep.P;
          p["reason"] = to_string(SlashReason::kMisaligned);
          out.push_back(emit(session, EventKind::kAuditorSlashed, std::move(p)));
        } else {
          p["amount"] = 0.0;
          out.push_back(emit(session, EventKind::kRewardPaid, std::move(p)));
        }
      }
    }
  }
  return out;
}

Digest Ledger::state_digest(std::uint64_t session) const {
  return sha256(to_json(this->session(session)).dump());
}

Digest Ledger::state_digest() const {
  json j;
  j["sessions"] = json::array();
  for (const auto& [id, s] : sessions_) j["sessions"].push_back(to_json(s));
  j["seats"] = json::object();
  for (const auto& [id, st] : seats_) {
    j["seats"][id] = {{"reputation", st.reputation},
                      {"stake", st.stake},
                      {"cumulative_payoff", st.cumulative_payoff},
                      {"malicious", st.is_malicious}};
  }
  return sha256(j.dump());
}

Ledger Ledger::replay(std::span<const Event> events, std::map<SeatId, econ::SeatState> initial_seats) {
  Ledger l(std::move(initial_seats));
  for (const auto& e : events) l.apply(e);
  return l;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kCommit: return "commit";
    case Phase::kReveal: return "reveal";
    case Phase::kDone: return "done";
  }
  return "?";
}

std::string_view to_string(SessionStatus s) {
  return s == SessionStatus::kOpen ? "open" : "finalized";
}

std::string_view to_string(SlashReason r) {
  switch (r) {
    case SlashReason::kNonReveal: return "NonReveal";
    case SlashReason::kMisaligned: return "Misaligned";
    case SlashReason::kHoneypot: return "Honeypot";
  }
  return "?";
}

namespace {
constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::kSessionCreated, "SessionCreated"},
    {EventKind::kVoteCommitted, "VoteCommitted"},
    {EventKind::kPhaseAdvanced, "PhaseAdvanced"},
    {EventKind::kVoteRevealed, "VoteRevealed"},
    {EventKind::kSegmentFinalized, "SegmentFinalized"},
    {EventKind::kTraceFinalized, "TraceFinalized"},
    {EventKind::kAuditorSlashed, "AuditorSlashed"},
    {EventKind::kRewardPaid, "RewardPaid"},
};
}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kEventNames) {
    if (kind == k) return name;
  }
  return "?";
}

EventKind parse_event_kind(std::string_view s) {
  for (const auto& [kind, name] : kEventNames) {
    if (name == s) return kind;
  }
  throw ConfigParseError("unknown event kind '" + std::string(s) + "'");
}

json to_json(const Event& e) {
  return {{"session", e.session}, {"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

Event event_from_json(const json& j) {
  try {
    Event e;
    e.session = j.at("session").get<std::uint64_t>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = parse_event_kind(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception& ex) {
    throw ConfigParseError(std::string("malformed event: ") + ex.what());
  }
}

json to_json(const AuditSession& s) {
  json j;
  j["session"] = s.session_id;
  j["trace_root"] = to_hex(s.trace_root);
  j["seed"] = to_hex(s.seed);
  j["status"] = to_string(s.status);
  j["trace_valid"] = s.trace_valid ? json(*s.trace_valid) : json(nullptr);
  j["settled"] = s.settled;
  j["segments"] = json::array();
  for (const auto& seg : s.segments) {
    json g;
    g["segment"] = seg.segment_id;
    g["node"] = seg.node;
    g["committee"] = committee_json(seg.committee);
    g["phase"] = to_string(seg.phase);
    g["commitments"] = json::object();
    for (const auto& [seat, c] : seg.commitments) g["commitments"][seat] = to_hex(c);
    g["reveals"] = json::object();
    for (const auto& [seat, r] : seg.reveals) {
      g["reveals"][seat] = {{"vote", r.vote}, {"salt", to_hex(r.salt)}};
    }
    g["verdict"] = seg.verdict ? json(*seg.verdict) : json(nullptr);
    g["pass_weight"] = seg.pass_weight;
    g["non_revealers"] = seg.non_revealers;
    j["segments"].push_back(std::move(g));
  }
  j["events"] = json::array();
  for (const auto& e : s.events) j["events"].push_back(to_json(e));
  return j;
}

}  // namespace trust::ledger
