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

// trustctl: file-driven front end for the audit library.
//
// Exit codes: 0 success, 2 config error, 3 audit failure, 4 structural
// error, 5 assertion failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trust/attribution.hpp"
#include "trust/config_io.hpp"
#include "trust/digest.hpp"
#include "trust/errors.hpp"
#include "trust/graph.hpp"
#include "trust/graph_io.hpp"
#include "trust/ledger.hpp"
#include "trust/ledger_io.hpp"
#include "trust/montecarlo.hpp"
#include "trust/refinement.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kAuditFail = 3, kStructural = 4, kAssertion = 5 };

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  bool assert_bounds = false;
  fs::path out_dir = "out";
  std::string format = "json";
  fs::path input;
  trust::attribution::AuditThresholds thresholds;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw trust::ConfigParseError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text, const fs::path& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw trust::ConfigParseError(source.string() + ": " + e.what());
  }
}

// Flattens nested JSON into "path,value" rows.
void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

/// Collects output files and writes the run manifest last.
class Run {
 public:
  Run(std::string command, const Options& opt, std::string config_bytes)
      : command_(std::move(command)), opt_(opt), config_digest_(trust::sha256(config_bytes)) {
    fs::create_directories(opt_.out_dir);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = opt_.out_dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw trust::ConfigParseError("cannot write '" + p.string() + "'");
    out << content;
    outputs_.push_back({{"path", name}, {"sha256", trust::to_hex(trust::sha256(content))}});
  }

  void write_report(const std::string& stem, const json& j) {
    if (opt_.format == "csv") {
      std::ostringstream os;
      os << "key,value\n";
      flatten(j, "", os);
      write(stem + ".csv", os.str());
    } else {
      write(stem + ".json", j.dump(2) + "\n");
    }
  }

  void finish(std::optional<std::uint64_t> seed) {
    json m = {{"command", command_},
              {"config_digest", trust::to_hex(config_digest_)},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"tool_version", TRUST_VERSION},
              {"outputs", outputs_}};
    std::ofstream(opt_.out_dir / "manifest.json", std::ios::binary) << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  const Options& opt_;
  trust::Digest config_digest_;
  json outputs_ = json::array();
};

trust::io::AnalysisConfig load_analysis(const Options& opt, std::string& bytes) {
  bytes = read_file(opt.input);
  auto cfg = trust::io::analysis_config_from_json(parse_json_text(bytes, opt.input));
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (opt.trials) {
    if (*opt.trials < 1) throw trust::ConfigParseError("--trials must be >= 1");
    cfg.sim.trials = *opt.trials;
  }
  return cfg;
}

int report_assertions(const std::vector<trust::mc::Assertion>& checks, json& out) {
  int failed = 0;
  out = json::array();
  for (const auto& a : checks) {
    out.push_back(trust::io::to_json(a));
    std::cout << (a.passed ? "  ok    " : "  FAIL  ") << a.name << " (" << a.detail << ")\n";
    failed += a.passed ? 0 : 1;
  }
  return failed;
}

int cmd_bounds(const Options& opt) {
  std::string bytes;
  const auto cfg = load_analysis(opt, bytes);
  const json report = trust::io::bounds_report(cfg);
  Run run("bounds", opt, bytes);
  run.write_report("bounds", report);
  run.finish(std::nullopt);

  const auto& e = report.at("economics");
  std::cout << "segments " << cfg.vote.segments.size() << ", W_beta " << report.at("trace").at("threshold_weight")
            << ", mu " << report.at("trace").at("mu") << "\n";
  for (const auto& t : report.at("tiers")) {
    std::cout << "  p[" << t.at("params").at("tier").get<std::string>() << ", k=" << t.at("params").at("k")
              << "] = " << t.at("pass_probability") << "\n";
  }
  std::cout << "S1 " << (report.at("s1").at("holds").get<bool>() ? "holds" : "fails") << ", E1 "
            << (e.at("e1").get<bool>() ? "holds" : "fails") << ", E2 " << (e.at("e2").get<bool>() ? "holds" : "fails")
            << ", mu_min " << e.at("mu_min") << ", alpha " << e.at("alpha") << "\n";
  if (!report.at("tail_bounds").is_null()) {
    std::cout << "ln P[honest loss] " << report.at("tail_bounds").at("honest_loss").at("ln")
              << ", ln P[malicious profit] " << report.at("tail_bounds").at("malicious_profit").at("ln") << "\n";
  }
  return kOk;
}

int cmd_audit(const Options& opt) {
  const std::string bytes = read_file(opt.input);
  const auto g = trust::graph::interaction_graph_from_json(parse_json_text(bytes, opt.input));
  const auto report = trust::attribution::localize_faults(g, opt.thresholds);
  Run run("audit", opt, bytes);
  run.write_report("fault_report", trust::attribution::to_json(report));
  run.finish(std::nullopt);
  std::cout << "nodes " << g.nodes.size() << ": " << report.root_causes.size() << " root cause(s), "
            << report.cascades.size() << " cascade(s), " << report.negligent.size() << " negligent\n";
  for (const auto& id : report.root_causes) std::cout << "  root cause: " << id << "\n";
  for (const auto& id : report.negligent) std::cout << "  negligent: " << id << "\n";
  return report.all_valid() ? kOk : kAuditFail;
}

int cmd_validate(const Options& opt) {
  const std::string bytes = read_file(opt.input);
  const auto g = trust::graph::reasoning_graph_from_json(parse_json_text(bytes, opt.input));
  const auto violations = trust::graph::validate_hdag(g);
  json out = json::array();
  for (const auto& v : violations) out.push_back(trust::graph::to_json(v));
  Run run("validate", opt, bytes);
  run.write_report("violations", {{"valid", violations.empty()}, {"violations", out}});
  run.finish(std::nullopt);
  for (const auto& v : out) std::cout << "  " << v.dump() << "\n";
  std::cout << (violations.empty() ? "graph valid\n" : "graph invalid\n");
  return violations.empty() ? kOk : kStructural;
}

int cmd_simulate(const Options& opt) {
  std::string bytes;
  const auto cfg = load_analysis(opt, bytes);
  const auto report = trust::mc::simulate(cfg.sim);
  json j = trust::io::to_json(report);
  std::cout << "trials " << cfg.sim.trials << ", horizon trials " << cfg.sim.horizon_trial_count() << ", seed "
            << cfg.sim.seed << "\n";
  int failed = 0;
  if (opt.assert_bounds) {
    json checks;
    failed = report_assertions(trust::mc::check_report(report), checks);
    j["assertions"] = checks;
  }
  Run run("simulate", opt, bytes);
  run.write_report("simulation", j);
  run.finish(cfg.sim.seed);
  std::cout << "trace fail " << report.trace.empirical_fail.value << " (bound " << report.trace.bounds.min
            << "), honest <= 0: " << report.horizon.honest_nonpositive
            << ", malicious >= 0: " << report.horizon.malicious_nonnegative << "\n";
  return failed == 0 ? kOk : kAssertion;
}

int cmd_sweep(const Options& opt) {
  std::string bytes;
  const auto cfg = load_analysis(opt, bytes);
  const auto cells = trust::mc::sweep(cfg.sim);
  std::ostringstream csv;
  csv << trust::io::sweep_csv_header() << "\n";
  json cells_json = json::array();
  int failed = 0;
  for (const auto& c : cells) {
    csv << trust::io::sweep_csv_row(c) << "\n";
    json cj = trust::io::to_json(c);
    if (opt.assert_bounds) {
      std::cout << "cell rho=" << c.rho << " eps=" << c.epsilon << "\n";
      json checks;
      failed += report_assertions(trust::mc::check_report(c.report), checks);
      cj["assertions"] = checks;
    }
    cells_json.push_back(std::move(cj));
  }
  Run run("sweep", opt, bytes);
  run.write("sweep.csv", csv.str());
  if (opt.format == "json") run.write("sweep.json", json{{"cells", cells_json}}.dump(2) + "\n");
  run.finish(cfg.sim.seed);
  std::size_t feasible = 0;
  for (const auto& c : cells) feasible += c.feasible ? 1 : 0;
  std::cout << cells.size() << " cells, " << feasible << " feasible\n";
  return failed == 0 ? kOk : kAssertion;
}

// Input: { "graph": <interaction graph> | "graph_path": "...", "max_rounds": 5,
//          "thresholds": {...}, "regenerations": { "<node>": [ {...}, ... ] } }
// Each regeneration of a node consumes the next scripted entry; the last one
// repeats, and unscripted nodes keep their score.
int cmd_refine(const Options& opt) {
  const std::string bytes = read_file(opt.input);
  const json doc = parse_json_text(bytes, opt.input);
  json graph_doc;
  if (doc.contains("graph")) {
    graph_doc = doc.at("graph");
  } else if (doc.contains("graph_path")) {
    fs::path p = doc.at("graph_path").get<std::string>();
    if (p.is_relative()) p = opt.input.parent_path() / p;
    graph_doc = trust::graph::read_json_file(p);
  } else {
    throw trust::ConfigParseError("$.graph: required");
  }
  auto g = trust::graph::interaction_graph_from_json(graph_doc);
  trust::attribution::AuditThresholds th = opt.thresholds;
  if (doc.contains("thresholds")) {
    const auto& t = doc.at("thresholds");
    th.tau_node = t.value("tau_node", th.tau_node);
    th.tau_edge = t.value("tau_edge", th.tau_edge);
    th.tau_stat = t.value("tau_stat", th.tau_stat);
  }
  const int max_rounds = doc.value("max_rounds", trust::refinement::kDefaultMaxRounds);

  std::map<std::string, std::vector<trust::refinement::Regeneration>> script;
  if (doc.contains("regenerations")) {
    for (const auto& [node, list] : doc.at("regenerations").items()) {
      for (const auto& r : list) {
        trust::refinement::Regeneration regen;
        regen.validity_score = r.at("validity_score").get<double>();
        if (r.contains("approved")) regen.approved = r.at("approved").get<bool>();
        if (r.contains("similarity_to_prev")) regen.similarity_to_prev = r.at("similarity_to_prev").get<double>();
        if (r.contains("protocol_score")) regen.protocol_score = r.at("protocol_score").get<double>();
        if (r.contains("fidelity_score")) regen.fidelity_score = r.at("fidelity_score").get<double>();
        if (r.contains("error_tag")) regen.error_tag = trust::graph::parse_error_tag(r.at("error_tag").get<std::string>());
        script[node].push_back(regen);
      }
    }
  }
  std::map<std::string, std::size_t> used;
  auto regenerator = [&](const trust::refinement::RegenerationRequest& req) {
    auto it = script.find(req.node.id);
    if (it == script.end() || it->second.empty()) {
      trust::refinement::Regeneration same;
      same.validity_score = req.node.validity_score;
      return same;
    }
    const std::size_t i = std::min(used[req.node.id]++, it->second.size() - 1);
    return it->second[i];
  };
  const auto result = trust::refinement::run_refinement_loop(std::move(g), th, regenerator, max_rounds);

  json log = json::array();
  for (const auto& r : result.log) log.push_back(trust::refinement::to_json(r));
  const json out = {{"termination", trust::refinement::to_string(result.termination)},
                    {"rounds", result.rounds},
                    {"log", log},
                    {"graph", trust::graph::to_json(result.graph)}};
  Run run("refine", opt, bytes);
  run.write_report("refinement", out);
  run.finish(std::nullopt);
  std::cout << "terminated: " << trust::refinement::to_string(result.termination) << " after " << result.rounds
            << " round(s)\n";
  return result.termination == trust::refinement::Termination::kAllValid ? kOk : kAuditFail;
}

int cmd_session(const Options& opt) {
  const std::string bytes = read_file(opt.input);
  std::istringstream in(bytes);
  const auto result = trust::ledger::run_session_script(in, opt.input.parent_path());
  const auto& ledger = result.ledger;

  std::ostringstream events;
  trust::ledger::write_events_jsonl(events, ledger.events());
  const auto replayed = trust::ledger::Ledger::replay(ledger.events(), result.initial_seats);
  const auto digest = ledger.state_digest();
  const bool replay_ok = replayed.state_digest() == digest;

  json sessions = json::array();
  for (auto id : ledger.session_ids()) {
    json s = trust::ledger::to_json(ledger.session(id));
    s.erase("events");
    s["state_digest"] = trust::to_hex(ledger.state_digest(id));
    sessions.push_back(std::move(s));
  }
  json seats = json::object();
  for (const auto& [id, st] : ledger.seats()) {
    seats[id] = {{"reputation", st.reputation}, {"stake", st.stake}, {"cumulative_payoff", st.cumulative_payoff}};
  }
  json steps = json::array();
  for (const auto& s : result.steps) {
    steps.push_back({{"line", s.line}, {"action", s.action}, {"result", s.result}});
  }
  Run run("session", opt, bytes);
  run.write("events.jsonl", events.str());
  run.write_report("session_state", {{"state_digest", trust::to_hex(digest)},
                                     {"replay_matches", replay_ok},
                                     {"sessions", sessions},
                                     {"seats", seats},
                                     {"steps", steps}});
  run.finish(std::nullopt);
  std::cout << ledger.events().size() << " events, state digest " << trust::to_hex(digest) << "\n"
            << "replay " << (replay_ok ? "reproduces" : "DOES NOT reproduce") << " the state\n";
  return replay_ok ? kOk : kAssertion;
}

int exit_code_for(trust::ErrorCode c) {
  using trust::ErrorCode;
  switch (c) {
    case ErrorCode::kCycle:
    case ErrorCode::kUnknownNode:
    case ErrorCode::kMissingVerdict:
    case ErrorCode::kRegeneratorFailure:
    case ErrorCode::kWrongPhase:
    case ErrorCode::kNotInCommittee:
    case ErrorCode::kDuplicateCommit:
    case ErrorCode::kHashMismatch:
    case ErrorCode::kNoCommitment:
    case ErrorCode::kAlreadyFinalized:
    case ErrorCode::kSegmentsPending:
    case ErrorCode::kNotFinalized:
    case ErrorCode::kAlreadySettled:
    case ErrorCode::kInsufficientSeats:
    case ErrorCode::kNothingToRepair:
      return kStructural;
    default:
      return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit, bound and simulate decentralized reasoning-trace verification"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", TRUST_VERSION);

  Options opt;
  app.add_option("--seed", opt.seed, "Simulation seed (overrides the config)");
  app.add_option("--trials", opt.trials, "Monte Carlo trials (overrides the config)");
  app.add_flag("--assert-bounds", opt.assert_bounds, "Exit 5 when an empirical check fails");
  app.add_option("--out-dir", opt.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    const char* input_help;
    int (*fn)(const Options&);
    bool thresholds;
  };
  const Command commands[] = {
      {"bounds", "Analytic bounds and parameter checks", "Analysis config (JSON)", cmd_bounds, false},
      {"audit", "Fault localization over an interaction graph", "Interaction graph (JSON)", cmd_audit, true},
      {"validate", "Structural checks of a reasoning graph", "Reasoning graph (JSON)", cmd_validate, false},
      {"simulate", "Monte Carlo validation of the analytic quantities", "Analysis config (JSON)", cmd_simulate,
       false},
      {"sweep", "Stress-test sweep over rho and epsilon grids", "Analysis config (JSON)", cmd_sweep, false},
      {"refine", "Prune-freeze-repair loop with scripted regenerations", "Refinement input (JSON)", cmd_refine,
       true},
      {"session", "Run a ledger session script", "Session script (JSON lines)", cmd_session, false},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("input", opt.input, c.input_help)->required()->check(CLI::ExistingFile);
    if (c.thresholds) {
      sub->add_option("--tau-node", opt.thresholds.tau_node, "Node validity threshold")->capture_default_str();
      sub->add_option("--tau-edge", opt.thresholds.tau_edge, "Edge protocol/fidelity threshold")
          ->capture_default_str();
      sub->add_option("--tau-stat", opt.thresholds.tau_stat, "Stationarity similarity threshold")
          ->capture_default_str();
    }
    sub->callback([&selected, fn = c.fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  try {
    return selected(opt);
  } catch (const trust::Error& e) {
    std::cerr << "error: " << trust::error_code_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: ConfigParseError: " << e.what() << "\n";
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
