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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "trust/graph.hpp"

namespace trust::graph {

/// Schema version carried in the "v" field of graph documents.
inline constexpr int kGraphSchemaVersion = 1;

// Parsers throw ConfigParseError naming the offending field.
ReasoningGraph reasoning_graph_from_json(const nlohmann::json& doc);
InteractionGraph interaction_graph_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ReasoningGraph& g);
nlohmann::json to_json(const InteractionGraph& g);
nlohmann::json to_json(const Violation& v);

/// Reads and parses a JSON file; syntax errors carry the byte offset.
nlohmann::json read_json_file(const std::filesystem::path& path);

Level parse_level(std::string_view s);
Difficulty parse_difficulty(std::string_view s);
Tier parse_tier(std::string_view s);
EdgeKind parse_edge_kind(std::string_view s);
NodeStatus parse_status(std::string_view s);
ErrorTag parse_error_tag(std::string_view s);
AgentRole parse_role(std::string_view s);

}  // namespace trust::graph
