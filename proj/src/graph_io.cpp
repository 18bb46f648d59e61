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

#include "trust/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "trust/errors.hpp"

namespace trust::graph {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigParseError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected string");
  return v.get<std::string>();
}

double get_unit(const json& obj, const char* key, const std::string& where, double fallback,
                bool required) {
  if (!obj.contains(key)) {
    if (required) fail(where, std::string("missing field '") + key + "'");
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected number");
  const double x = v.get<double>();
  if (!(x >= 0.0 && x <= 1.0)) fail(where + "." + key, "must lie in [0,1]");
  return x;
}

Digest get_digest(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return Digest{};
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "expected hex string");
  try {
    return digest_from_hex(v.get<std::string>());
  } catch (const Error& e) {
    fail(where + "." + key, e.what());
  }
}

void check_version(const json& doc) {
  if (!doc.is_object()) fail("$", "expected JSON object");
  if (!doc.contains("v")) fail("$", "missing schema version field 'v'");
  if (!doc.at("v").is_number_integer() || doc.at("v").get<int>() != kGraphSchemaVersion) {
    fail("$.v", "unsupported schema version");
  }
}

const json& require_array(const json& doc, const char* key) {
  const json& arr = require(doc, key, "$");
  if (!arr.is_array()) fail(std::string("$.") + key, "expected array");
  return arr;
}

template <typename Fn>
auto parse_enum(std::string_view s, const std::string& where, Fn fn) {
  try {
    return fn(s);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

}  // namespace

Level parse_level(std::string_view s) {
  if (s == "goal") return Level::kGoal;
  if (s == "strategy") return Level::kStrategy;
  if (s == "tactic") return Level::kTactic;
  if (s == "step") return Level::kStep;
  if (s == "operation") return Level::kOperation;
  throw ConfigParseError("unknown level '" + std::string(s) + "'");
}

Difficulty parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::kEasy;
  if (s == "medium") return Difficulty::kMedium;
  if (s == "hard") return Difficulty::kHard;
  throw ConfigParseError("unknown difficulty '" + std::string(s) + "'");
}

Tier parse_tier(std::string_view s) {
  if (s == "computational") return Tier::kComputational;
  if (s == "llm") return Tier::kLlm;
  if (s == "human") return Tier::kHuman;
  throw ConfigParseError("unknown tier '" + std::string(s) + "'");
}

EdgeKind parse_edge_kind(std::string_view s) {
  if (s == "decomposes_to") return EdgeKind::kDecomposesTo;
  if (s == "depends_on") return EdgeKind::kDependsOn;
  if (s == "enables") return EdgeKind::kEnables;
  if (s == "validates") return EdgeKind::kValidates;
  if (s == "contradicts") return EdgeKind::kContradicts;
  throw ConfigParseError("unknown edge kind '" + std::string(s) + "'");
}

NodeStatus parse_status(std::string_view s) {
  if (s == "unaudited") return NodeStatus::kUnaudited;
  if (s == "valid") return NodeStatus::kValid;
  if (s == "invalid_root") return NodeStatus::kInvalidRoot;
  if (s == "invalid_cascade") return NodeStatus::kInvalidCascade;
  if (s == "negligent") return NodeStatus::kNegligent;
  throw ConfigParseError("unknown status '" + std::string(s) + "'");
}

ErrorTag parse_error_tag(std::string_view s) {
  if (s == "none") return ErrorTag::kNone;
  if (s == "factual") return ErrorTag::kFactual;
  if (s == "arithmetic") return ErrorTag::kArithmetic;
  if (s == "logical") return ErrorTag::kLogical;
  if (s == "strategy") return ErrorTag::kStrategy;
  throw ConfigParseError("unknown error tag '" + std::string(s) + "'");
}

AgentRole parse_role(std::string_view s) {
  if (s == "planner") return {Role::kPlanner, ""};
  if (s == "coder") return {Role::kCoder, ""};
  if (s == "reviewer") return {Role::kReviewer, ""};
  if (s == "aggregator") return {Role::kAggregator, ""};
  return {Role::kOther, std::string(s)};
}

ReasoningGraph reasoning_graph_from_json(const json& doc) {
  check_version(doc);
  ReasoningGraph g;
  g.goal_id = get_string(doc, "goal", "$");
  if (doc.contains("answer") && !doc.at("answer").is_null()) {
    g.answer_id = get_string(doc, "answer", "$");
  }
  const json& nodes = require_array(doc, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "$.nodes[" + std::to_string(i) + "]";
    const json& jn = nodes[i];
    HdagNode n;
    n.id = get_string(jn, "id", where);
    n.level = parse_enum(get_string(jn, "level", where), where + ".level", parse_level);
    n.difficulty = jn.contains("difficulty")
                       ? parse_enum(get_string(jn, "difficulty", where), where + ".difficulty",
                                    parse_difficulty)
                       : Difficulty::kEasy;
    n.domain = jn.contains("domain") ? get_string(jn, "domain", where) : std::string();
    n.content_hash = get_digest(jn, "content_hash", where);
    if (jn.contains("high_stakes")) {
      if (!jn.at("high_stakes").is_boolean()) fail(where + ".high_stakes", "expected boolean");
      n.high_stakes = jn.at("high_stakes").get<bool>();
    }
    n.tier = jn.contains("tier")
                 ? parse_enum(get_string(jn, "tier", where), where + ".tier", parse_tier)
                 : assign_tier(n);
    g.nodes.push_back(std::move(n));
  }
  const json& edges = require_array(doc, "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "$.edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    g.edges.push_back({get_string(je, "from", where), get_string(je, "to", where),
                       parse_enum(get_string(je, "kind", where), where + ".kind",
                                  parse_edge_kind)});
  }
  return g;
}

InteractionGraph interaction_graph_from_json(const json& doc) {
  check_version(doc);
  const json& nodes = require_array(doc, "nodes");
  const json& edges = require_array(doc, "edges");

  bool round_mode = false;
  for (const auto& je : edges) {
    if (je.is_object() && je.contains("round")) round_mode = true;
  }

  std::vector<CigNode> states;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "$.nodes[" + std::to_string(i) + "]";
    const json& jn = nodes[i];
    CigNode n;
    if (jn.contains("agent")) n.agent = get_string(jn, "agent", where);
    if (jn.contains("round")) {
      if (!jn.at("round").is_number_unsigned()) fail(where + ".round", "expected non-negative integer");
      n.round = jn.at("round").get<unsigned>();
    }
    if (jn.contains("id")) {
      n.id = get_string(jn, "id", where);
    } else if (!n.agent.empty()) {
      n.id = instance_id(n.agent, n.round);
    } else {
      fail(where, "node needs 'id' or 'agent'");
    }
    if (n.agent.empty()) n.agent = n.id;
    n.role = jn.contains("role") ? parse_role(get_string(jn, "role", where)) : AgentRole{};
    n.input_hash = get_digest(jn, "input_hash", where);
    n.output_hash = get_digest(jn, "output_hash", where);
    n.validity_score = get_unit(jn, "validity_score", where, 1.0, true);
    if (jn.contains("approved")) {
      if (!jn.at("approved").is_boolean()) fail(where + ".approved", "expected boolean");
      n.approved = jn.at("approved").get<bool>();
    }
    if (jn.contains("error_tag")) {
      n.error_tag = parse_enum(get_string(jn, "error_tag", where), where + ".error_tag",
                               parse_error_tag);
    }
    if (jn.contains("similarity_to_prev") && !jn.at("similarity_to_prev").is_null()) {
      n.similarity_to_prev = get_unit(jn, "similarity_to_prev", where, 0.0, true);
    }
    if (jn.contains("status")) {
      n.status = parse_enum(get_string(jn, "status", where), where + ".status", parse_status);
    }
    states.push_back(std::move(n));
  }

  if (round_mode) {
    std::vector<AgentMessage> messages;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string where = "$.edges[" + std::to_string(i) + "]";
      const json& je = edges[i];
      AgentMessage m;
      m.from_agent = get_string(je, "from", where);
      m.to_agent = get_string(je, "to", where);
      if (!je.contains("round") || !je.at("round").is_number_unsigned()) {
        fail(where + ".round", "every edge needs a non-negative 'round' when any edge has one");
      }
      m.round = je.at("round").get<unsigned>();
      m.protocol_score = get_unit(je, "protocol_score", where, 1.0, false);
      m.fidelity_score = get_unit(je, "fidelity_score", where, 1.0, false);
      messages.push_back(std::move(m));
    }
    return unroll(std::move(states), messages);
  }

  InteractionGraph g;
  g.nodes = std::move(states);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "$.edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    g.edges.push_back({get_string(je, "from", where), get_string(je, "to", where),
                       get_unit(je, "protocol_score", where, 1.0, false),
                       get_unit(je, "fidelity_score", where, 1.0, false)});
  }
  return g;
}

json to_json(const ReasoningGraph& g) {
  json doc;
  doc["v"] = kGraphSchemaVersion;
  doc["goal"] = g.goal_id;
  if (g.answer_id) doc["answer"] = *g.answer_id;
  doc["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    doc["nodes"].push_back({{"id", n.id},
                            {"level", to_string(n.level)},
                            {"difficulty", to_string(n.difficulty)},
                            {"domain", n.domain},
                            {"content_hash", to_hex(n.content_hash)},
                            {"tier", to_string(n.tier)},
                            {"high_stakes", n.high_stakes}});
  }
  doc["edges"] = json::array();
  for (const auto& e : g.edges) {
    doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
  }
  return doc;
}

json to_json(const InteractionGraph& g) {
  json doc;
  doc["v"] = kGraphSchemaVersion;
  doc["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    json jn = {{"id", n.id},
               {"agent", n.agent},
               {"round", n.round},
               {"role", to_string(n.role)},
               {"input_hash", to_hex(n.input_hash)},
               {"output_hash", to_hex(n.output_hash)},
               {"validity_score", n.validity_score},
               {"approved", n.approved},
               {"error_tag", to_string(n.error_tag)},
               {"status", to_string(n.status)}};
    if (n.similarity_to_prev) jn["similarity_to_prev"] = *n.similarity_to_prev;
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = json::array();
  for (const auto& e : g.edges) {
    doc["edges"].push_back({{"from", e.from},
                            {"to", e.to},
                            {"protocol_score", e.protocol_score},
                            {"fidelity_score", e.fidelity_score}});
  }
  return doc;
}

json to_json(const Violation& v) {
  json j = {{"rule", to_string(v.rule)}, {"node", v.node}, {"detail", v.detail}};
  if (v.edge) j["edge"] = *v.edge;
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(path.string() + ": " + e.what());
  }
}

}  // namespace trust::graph
