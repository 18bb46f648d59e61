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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trust/ledger.hpp"

namespace trust::ledger {

struct ScriptStep {
  std::size_t line = 0;
  std::string action;
  std::optional<std::string> error;  // expected error that was raised
  nlohmann::json result;
};

struct ScriptResult {
  Ledger ledger;
  std::map<SeatId, econ::SeatState> initial_seats;
  std::vector<ScriptStep> steps;
};

/// Executes a session script: one JSON object per line with an "action" of
/// register_seat, create_session, commit, close_commit, reveal,
/// finalize_segment, finalize_trace or settle. Blank lines and lines starting
/// with '#' are skipped. A step may carry "expect_error" naming the error it
/// must raise. Relative graph paths resolve against base_dir.
///
/// Malformed lines throw ConfigParseError; action errors are rethrown with
/// their code and the line number.
ScriptResult run_session_script(std::istream& in, const std::filesystem::path& base_dir = {});

void write_events_jsonl(std::ostream& out, std::span<const Event> events);
std::vector<Event> read_events_jsonl(std::istream& in);

}  // namespace trust::ledger
