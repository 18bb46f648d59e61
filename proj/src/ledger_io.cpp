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

#include "trust/ledger_io.hpp"

#include <istream>
#include <ostream>

#include "trust/config_io.hpp"
#include "trust/errors.hpp"
#include "trust/graph_io.hpp"
#include "trust/consensus_stats.hpp"
#include "trust/merkle.hpp"

namespace trust::ledger {

using nlohmann::json;

namespace {

class ScriptRunner {
 public:
  explicit ScriptRunner(std::filesystem::path base) : base_(std::move(base)) {}

  json run(const json& step);
  ScriptResult finish(std::vector<ScriptStep> steps) {
    return {std::move(ledger_), std::move(initial_seats_), std::move(steps)};
  }

 private:
  static const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigParseError(std::string("missing field '") + key + "'");
    return j.at(key);
  }
  static std::uint64_t uint_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_unsigned()) throw ConfigParseError(std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }
  static std::string string_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) throw ConfigParseError(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }
  static bool bool_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_boolean()) throw ConfigParseError(std::string("'") + key + "' must be a boolean");
    return v.get<bool>();
  }
  static Digest digest_field(const json& j, const char* key, const char* text_key) {
    if (j.contains(text_key)) return sha256(string_field(j, text_key));
    try {
      return digest_from_hex(string_field(j, key));
    } catch (const InvalidArgument& e) {
      throw ConfigParseError(std::string("'") + key + "': " + e.what());
    }
  }

  json create_session(const json& step);
  json finalize_trace(const json& step);

  std::filesystem::path base_;
  Ledger ledger_;
  std::map<SeatId, econ::SeatState> initial_seats_;
  std::vector<SeatInfo> seat_infos_;
};

json ScriptRunner::run(const json& step) {
  const std::string action = string_field(step, "action");
  if (action == "register_seat") {
    const SeatId seat = string_field(step, "seat");
    if (ledger_.seats().contains(seat)) throw InvalidArgument("seat '" + seat + "' already registered");
    econ::SeatState st;
    st.stake = step.value("stake", 1.0);
    st.reputation = step.value("reputation", econ::kInitialReputation);
    st.is_malicious = step.value("malicious", false);
    if (!(st.reputation >= 0.0 && st.reputation <= 1.0)) throw InvalidArgument("reputation must be in [0,1]");
    const graph::Tier tier = graph::parse_tier(step.value("tier", std::string("human")));
    seat_infos_.push_back({seat, st.stake, tier, step.value("available", true)});
    ledger_.register_seat(seat, st);
    initial_seats_[seat] = st;
    return {{"seat", seat}};
  }
  if (action == "create_session") return create_session(step);
  if (action == "commit") {
    const Digest c = step.contains("commitment") ? digest_field(step, "commitment", "commitment_text")
                                                 : make_commitment(bool_field(step, "vote"), digest_field(step, "salt", "salt_text"));
    return to_json(ledger_.commit_vote(uint_field(step, "session"), uint_field(step, "segment"),
                                       string_field(step, "seat"), c));
  }
  if (action == "close_commit") {
    return to_json(ledger_.close_commit(uint_field(step, "session"), uint_field(step, "segment")));
  }
  if (action == "reveal") {
    return to_json(ledger_.reveal_vote(uint_field(step, "session"), uint_field(step, "segment"),
                                       string_field(step, "seat"), bool_field(step, "vote"),
                                       digest_field(step, "salt", "salt_text")));
  }
  if (action == "finalize_segment") {
    const double tau = step.value("tau", stats::kDefaultTau);
    return {{"verdict", ledger_.finalize_segment(uint_field(step, "session"), uint_field(step, "segment"), tau)}};
  }
  if (action == "finalize_trace") return finalize_trace(step);
  if (action == "settle") {
    const econ::EconomicParams ep =
        step.contains("economics") ? io::economic_params_from_json(step.at("economics"), "economics")
                                   : econ::EconomicParams{};
    json events = json::array();
    for (const auto& e : ledger_.settle(uint_field(step, "session"), ep)) events.push_back(to_json(e));
    return {{"events", events}};
  }
  throw ConfigParseError("unknown action '" + action + "'");
}

json ScriptRunner::create_session(const json& step) {
  const Digest seed = digest_field(step, "seed", "seed_text");
  const json& segs = field(step, "segments");
  if (!segs.is_array() || segs.empty()) throw ConfigParseError("'segments' must be a non-empty array");
  std::vector<SegmentSpec> specs;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const json& s = segs[i];
    SegmentSpec spec;
    spec.node = string_field(s, "node");
    if (s.contains("committee")) {
      for (const auto& m : s.at("committee")) {
        if (m.is_string()) {
          const SeatId id = m.get<std::string>();
          auto it = ledger_.seats().find(id);
          if (it == ledger_.seats().end()) throw InvalidArgument("unregistered seat '" + id + "'");
          spec.committee.push_back({id, it->second.stake});
        } else {
          spec.committee.push_back({string_field(m, "seat"), field(m, "stake").get<double>()});
        }
      }
    } else {
      const graph::Tier tier = graph::parse_tier(string_field(s, "tier"));
      const int k = static_cast<int>(uint_field(s, "k"));
      Sha256 h;
      h.update("committee").update(std::span<const std::uint8_t>(seed)).update_u64(i).update(spec.node);
      spec.committee = select_committee(seat_infos_, tier, k, h.finish());
    }
    specs.push_back(std::move(spec));
  }
  Digest root{};
  if (step.contains("trace_root")) {
    root = digest_field(step, "trace_root", "trace_root_text");
  } else {
    std::vector<Digest> leaves;
    if (step.contains("segment_digests")) {
      for (const auto& d : step.at("segment_digests")) leaves.push_back(digest_from_hex(d.get<std::string>()));
    } else {
      for (const auto& s : specs) leaves.push_back(sha256(s.node));
    }
    root = merkle_root(leaves);
  }
  const std::uint64_t id = ledger_.create_session(root, std::move(specs), seed);
  if (step.contains("session") && uint_field(step, "session") != id) {
    throw InvalidArgument("script expects session " + std::to_string(uint_field(step, "session")) +
                          " but the ledger assigned " + std::to_string(id));
  }
  json committees = json::array();
  for (const auto& seg : ledger_.session(id).segments) {
    json c = json::array();
    for (const auto& m : seg.committee) c.push_back(m.seat);
    committees.push_back(c);
  }
  return {{"session", id}, {"trace_root", to_hex(root)}, {"committees", committees}};
}

json ScriptRunner::finalize_trace(const json& step) {
  json doc;
  if (step.contains("graph")) {
    doc = step.at("graph");
  } else {
    std::filesystem::path p = string_field(step, "graph_path");
    if (p.is_relative()) p = base_ / p;
    doc = graph::read_json_file(p);
  }
  const auto g = graph::reasoning_graph_from_json(doc);
  std::set<graph::NodeId> unresolved;
  if (step.contains("unresolved_roots")) {
    for (const auto& r : step.at("unresolved_roots")) unresolved.insert(r.get<std::string>());
  }
  return {{"valid", ledger_.finalize_trace(uint_field(step, "session"), g, unresolved)}};
}

}  // namespace

ScriptResult run_session_script(std::istream& in, const std::filesystem::path& base_dir) {
  ScriptRunner runner(base_dir);
  std::vector<ScriptStep> steps;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    const std::string at = "line " + std::to_string(line) + ": ";
    json step;
    try {
      step = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigParseError(at + e.what());
    }
    if (!step.is_object()) throw ConfigParseError(at + "expected a JSON object");
    ScriptStep rec;
    rec.line = line;
    rec.action = step.value("action", std::string());
    const std::optional<std::string> expected =
        step.contains("expect_error") ? std::optional(step.at("expect_error").get<std::string>()) : std::nullopt;
    try {
      rec.result = runner.run(step);
    } catch (const Error& e) {
      const std::string name(error_code_name(e.code()));
      if (expected && *expected == name) {
        rec.error = name;
        rec.result = {{"error", name}, {"message", e.what()}};
        steps.push_back(std::move(rec));
        continue;
      }
      throw Error(e.code(), at + e.what());
    } catch (const json::exception& e) {
      throw ConfigParseError(at + e.what());
    }
    if (expected) throw InvalidArgument(at + "expected " + *expected + " but the action succeeded");
    steps.push_back(std::move(rec));
  }
  return runner.finish(std::move(steps));
}

void write_events_jsonl(std::ostream& out, std::span<const Event> events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

std::vector<Event> read_events_jsonl(std::istream& in) {
  std::vector<Event> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(event_from_json(json::parse(text)));
    } catch (const json::parse_error& e) {
      throw ConfigParseError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace trust::ledger
