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

#include "trust/config_io.hpp"

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <set>
#include <sstream>

#include "trust/errors.hpp"
#include "trust/graph_io.hpp"

namespace trust::io {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigParseError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) throw ConfigParseError(path + "." + key + ": unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigParseError(path + ": expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigParseError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigParseError(path + ": expected a boolean");
  return j.get<bool>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigParseError(path + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void read_double(const json& j, const char* key, const std::string& path, double& out) {
  if (j.contains(key)) out = number(j.at(key), path + "." + key);
}

std::vector<stats::TierParams> segments_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigParseError(path + ": expected an array");
  std::vector<stats::TierParams> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    require_object(e, p, {"tier", "k", "epsilon", "rho", "w", "count"});
    if (!e.contains("tier") || !e.at("tier").is_string()) throw ConfigParseError(p + ".tier: expected a string");
    graph::Tier tier;
    try {
      tier = graph::parse_tier(e.at("tier").get<std::string>());
    } catch (const Error& ex) {
      throw ConfigParseError(p + ".tier: " + ex.what());
    }
    stats::TierParams t = stats::default_tier(tier);
    if (e.contains("k")) t.k = static_cast<int>(integer(e.at("k"), p + ".k"));
    read_double(e, "epsilon", p, t.epsilon);
    read_double(e, "rho", p, t.rho);
    read_double(e, "w", p, t.w);
    if (t.k < 1) throw ConfigParseError(p + ".k: must be >= 1");
    if (!(t.epsilon >= 0.0 && t.epsilon <= 1.0)) throw ConfigParseError(p + ".epsilon: must be in [0,1]");
    if (!(t.rho >= 0.0 && t.rho <= 1.0)) throw ConfigParseError(p + ".rho: must be in [0,1]");
    if (!(t.w > 0.0)) throw ConfigParseError(p + ".w: must be positive");
    const std::int64_t count = e.contains("count") ? integer(e.at("count"), p + ".count") : 1;
    if (count < 1) throw ConfigParseError(p + ".count: must be >= 1");
    for (std::int64_t c = 0; c < count; ++c) out.push_back(t);
  }
  if (out.empty()) throw ConfigParseError(path + ": at least one segment is required");
  return out;
}

// Shortest representation that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

econ::EconomicParams economic_params_from_json(const json& j, const std::string& path) {
  require_object(j, path, {"R", "P", "p_min", "p_max", "gamma", "delta", "lambda_rate", "horizon_T", "epsilon_H"});
  econ::EconomicParams ep;
  read_double(j, "R", path, ep.R);
  read_double(j, "P", path, ep.P);
  read_double(j, "p_min", path, ep.p_min);
  read_double(j, "p_max", path, ep.p_max);
  read_double(j, "gamma", path, ep.gamma);
  read_double(j, "delta", path, ep.delta);
  read_double(j, "lambda_rate", path, ep.lambda_rate);
  read_double(j, "horizon_T", path, ep.horizon_T);
  read_double(j, "epsilon_H", path, ep.epsilon_H);
  try {
    ep.validate();
  } catch (const Error& ex) {
    throw ConfigParseError(path + ": " + ex.what());
  }
  return ep;
}

AnalysisConfig analysis_config_from_json(const json& doc) {
  require_object(doc, "$", {"tau", "beta", "segments", "economics", "eps_target", "committee_bound", "simulation"});
  AnalysisConfig cfg;
  read_double(doc, "tau", "$", cfg.vote.tau);
  read_double(doc, "beta", "$", cfg.vote.beta);
  if (!(cfg.vote.tau > 0.0 && cfg.vote.tau <= 1.0)) throw ConfigParseError("$.tau: must be in (0,1]");
  if (!(cfg.vote.beta >= 0.0 && cfg.vote.beta <= 1.0)) throw ConfigParseError("$.beta: must be in [0,1]");
  if (!doc.contains("segments")) throw ConfigParseError("$.segments: required");
  cfg.vote.segments = segments_from_json(doc.at("segments"), "$.segments");
  if (doc.contains("economics")) cfg.econ = economic_params_from_json(doc.at("economics"), "$.economics");
  read_double(doc, "eps_target", "$", cfg.eps_target);
  if (!(cfg.eps_target > 0.0 && cfg.eps_target < 1.0)) throw ConfigParseError("$.eps_target: must be in (0,1)");
  if (doc.contains("committee_bound")) {
    const json& c = doc.at("committee_bound");
    require_object(c, "$.committee_bound", {"k", "epsilon"});
    if (c.contains("k")) {
      const json& ks = c.at("k");
      if (!ks.is_array()) throw ConfigParseError("$.committee_bound.k: expected an array");
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const std::string p = "$.committee_bound.k[" + std::to_string(i) + "]";
        const auto k = integer(ks[i], p);
        if (k < 1) throw ConfigParseError(p + ": must be >= 1");
        cfg.committee_ks.push_back(static_cast<int>(k));
      }
    }
    if (c.contains("epsilon")) cfg.committee_epsilon = number(c.at("epsilon"), "$.committee_bound.epsilon");
  }

  auto& sim = cfg.sim;
  sim.vote_cfg = cfg.vote;
  sim.econ = cfg.econ;
  sim.eps_target = cfg.eps_target;
  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    const std::string p = "$.simulation";
    require_object(s, p, {"trials", "horizon_trials", "seed", "fixed_count_mode", "rho_grid", "epsilon_grid", "threads"});
    if (s.contains("trials")) sim.trials = integer(s.at("trials"), p + ".trials");
    if (s.contains("horizon_trials")) sim.horizon_trials = integer(s.at("horizon_trials"), p + ".horizon_trials");
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) throw ConfigParseError(p + ".seed: expected a non-negative integer");
      sim.seed = s.at("seed").get<std::uint64_t>();
    }
    if (s.contains("fixed_count_mode")) sim.fixed_count_mode = boolean(s.at("fixed_count_mode"), p + ".fixed_count_mode");
    if (s.contains("rho_grid")) sim.rho_grid = number_list(s.at("rho_grid"), p + ".rho_grid");
    if (s.contains("epsilon_grid")) sim.epsilon_grid = number_list(s.at("epsilon_grid"), p + ".epsilon_grid");
    if (s.contains("threads")) sim.threads = static_cast<unsigned>(integer(s.at("threads"), p + ".threads"));
  }
  try {
    sim.validate();
  } catch (const Error& ex) {
    throw ConfigParseError("$.simulation: " + std::string(ex.what()));
  }
  return cfg;
}

json to_json(const stats::TierParams& t) {
  return {{"tier", graph::to_string(t.tier)}, {"k", t.k}, {"epsilon", t.epsilon}, {"rho", t.rho}, {"w", t.w}};
}

json to_json(const stats::VoteConfig& v) {
  json segs = json::array();
  for (const auto& s : v.segments) segs.push_back(to_json(s));
  return {{"tau", v.tau}, {"beta", v.beta}, {"segments", segs}};
}

json to_json(const econ::EconomicParams& ep) {
  return {{"R", ep.R},
          {"P", ep.P},
          {"p_min", ep.p_min},
          {"p_max", ep.p_max},
          {"gamma", ep.gamma},
          {"delta", ep.delta},
          {"lambda_rate", ep.lambda_rate},
          {"horizon_T", ep.horizon_T},
          {"epsilon_H", ep.epsilon_H}};
}

json to_json(const mc::Frequency& f) {
  return {{"hits", f.hits}, {"trials", f.trials}, {"value", f.value}, {"std_error", f.std_error}};
}

json log_probability(double ln_p) {
  return {{"ln", ln_p}, {"value", ln_p > -700.0 ? json(std::exp(ln_p)) : json(nullptr)}};
}

namespace {

json to_json(const stats::TraceFailBound& b) {
  return {{"hoeffding", log_probability(b.ln_hoeffding)},
          {"chernoff", log_probability(b.ln_chernoff)},
          {"chernoff_lambda", b.chernoff_lambda},
          {"min", b.min}};
}

json to_json(const econ::TailBounds& t) {
  return {{"honest_loss", log_probability(t.ln_honest_loss)},
          {"malicious_profit", log_probability(t.ln_malicious_profit)},
          {"range_bound", t.range_bound}};
}

}  // namespace

json to_json(const mc::SimReport& r) {
  json j;
  j["segments"] = json::array();
  for (const auto& t : r.segments) {
    j["segments"].push_back({{"params", to_json(t.params)}, {"empirical", to_json(t.empirical)}, {"analytic", t.analytic}});
  }
  j["trace"] = {{"empirical_fail", to_json(r.trace.empirical_fail)},
                {"exact_fail", r.trace.exact_fail ? json(*r.trace.exact_fail) : json(nullptr)},
                {"bounds", to_json(r.trace.bounds)}};
  const auto& h = r.horizon;
  j["horizon"] = {{"trials", h.trials},
                  {"fixed_count", h.fixed_count},
                  {"expected_segments", h.expected_segments},
                  {"mean_segments", h.mean_segments},
                  {"honest_nonpositive_count", h.honest_nonpositive},
                  {"malicious_nonnegative_count", h.malicious_nonnegative},
                  {"mean_payoffs", {{"honest", h.mean_honest}, {"malicious", h.mean_malicious}}},
                  {"std_errors", {{"honest", h.se_honest}, {"malicious", h.se_malicious}}},
                  {"honest_per_segment", h.honest_per_segment},
                  {"honest_per_segment_se", h.honest_per_segment_se},
                  {"mean_honest_reputation", h.mean_honest_reputation},
                  {"mu_H_at_mean_reputation", h.mu_H_at_mean_reputation},
                  {"e1", h.e1_holds},
                  {"e2", h.e2_holds},
                  {"sigma_H_sq", h.sigma_H_sq},
                  {"tail_bounds", h.tail ? to_json(*h.tail) : json(nullptr)},
                  {"malicious_mean_bound", h.malicious_mean_bound}};
  return j;
}

json to_json(const mc::SweepCell& c) {
  return {{"rho", c.rho},
          {"epsilon", c.epsilon},
          {"seed", c.seed},
          {"e1", c.e1},
          {"e2", c.e2},
          {"s1", {{"holds", c.s1.holds}, {"lhs", c.s1.lhs}, {"rhs", c.s1.rhs}, {"margin", c.s1.margin}}},
          {"feasible", c.feasible},
          {"report", to_json(c.report)}};
}

json to_json(const mc::Assertion& a) {
  return {{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}};
}

json bounds_report(const AnalysisConfig& cfg) {
  json j;
  j["config"] = {{"vote", to_json(cfg.vote)}, {"economics", to_json(cfg.econ)}, {"eps_target", cfg.eps_target}};

  json tiers = json::array();
  std::vector<stats::TierParams> seen;
  for (const auto& s : cfg.vote.segments) {
    bool dup = false;
    for (const auto& d : seen) {
      dup = dup || (d.tier == s.tier && d.k == s.k && d.epsilon == s.epsilon && d.rho == s.rho);
    }
    if (dup) continue;
    seen.push_back(s);
    tiers.push_back({{"params", to_json(s)},
                     {"quorum", stats::quorum(s.k, cfg.vote.tau)},
                     {"pass_probability", stats::segment_pass_prob(s, cfg.vote.tau)}});
  }
  j["tiers"] = tiers;

  const auto m = stats::trace_moments(cfg.vote);
  j["trace"] = {{"segments", cfg.vote.segments.size()},
                {"total_weight", cfg.vote.total_weight()},
                {"threshold_weight", cfg.vote.threshold_weight()},
                {"mu", m.mu},
                {"sigma_sq", m.sigma_sq},
                {"sigma_max_sq", m.sigma_max_sq},
                {"bounds", to_json(stats::trace_fail_bound(cfg.vote))},
                {"exact_fail", cfg.vote.segments.size() <= mc::kExactTraceMaxSegments
                                   ? json(stats::exact_trace_fail_prob(cfg.vote))
                                   : json(nullptr)}};

  const auto s1 = stats::check_s1(cfg.vote, cfg.econ.lambda_rate, cfg.econ.horizon_T, cfg.eps_target);
  j["s1"] = {{"holds", s1.holds}, {"lhs", s1.lhs}, {"rhs", s1.rhs}, {"margin", s1.margin}};

  const auto d = econ::check_economic_dials(cfg.econ);
  j["economics"] = {{"e1", d.e1},
                    {"e1_threshold", d.e1_threshold},
                    {"e2", d.e2},
                    {"e2_threshold", d.e2_threshold},
                    {"alpha", d.alpha},
                    {"mu_min", d.mu_min},
                    {"expected_payoff_malicious", econ::expected_payoff_malicious(cfg.econ)},
                    {"malicious_horizon_bound", econ::malicious_horizon_loss_bound(cfg.econ)},
                    {"expected_segments", cfg.econ.expected_segments()}};
  const auto var = econ::payoff_variance_bound(cfg.econ);
  j["variance"] = {{"sigma_H_sq", var.sup}, {"argmax_r", var.argmax_r}, {"crude", var.crude}};
  if (d.mu_min > 0.0) {
    j["tail_bounds"] = to_json(econ::tail_bounds(cfg.econ, var.sup));
  } else {
    j["tail_bounds"] = nullptr;
  }

  if (!cfg.committee_ks.empty()) {
    const double eps = cfg.committee_epsilon.value_or(cfg.econ.epsilon_H);
    json c = json::array();
    for (int k : cfg.committee_ks) {
      c.push_back({{"k", k}, {"epsilon", eps}, {"bound", stats::committee_error_bound(k, eps)}});
    }
    j["committee_bounds"] = c;
  }
  return j;
}

std::string sweep_csv_header() {
  return "rho,epsilon,pass_freq,pass_se,analytic_pass,trace_fail_freq,trace_fail_se,exact_trace_fail,"
         "hoeffding,chernoff,honest_nonpositive,malicious_nonnegative,mean_honest,mean_malicious,"
         "e1,e2,s1,s1_margin,feasible";
}

std::string sweep_csv_row(const mc::SweepCell& c) {
  const auto& r = c.report;
  // The swept tier is the first simulated tier whose parameters carry the cell coordinates.
  const mc::TierPass* swept = &r.segments.front();
  for (const auto& t : r.segments) {
    if (t.params.rho == c.rho && t.params.epsilon == c.epsilon) {
      swept = &t;
      break;
    }
  }
  std::ostringstream os;
  auto b = [](bool v) { return v ? "1" : "0"; };
  os << fmt(c.rho) << ',' << fmt(c.epsilon) << ',' << fmt(swept->empirical.value) << ','
     << fmt(swept->empirical.std_error) << ',' << fmt(swept->analytic) << ',' << fmt(r.trace.empirical_fail.value)
     << ',' << fmt(r.trace.empirical_fail.std_error) << ','
     << (r.trace.exact_fail ? fmt(*r.trace.exact_fail) : std::string()) << ',' << fmt(r.trace.bounds.hoeffding)
     << ',' << fmt(r.trace.bounds.chernoff) << ',' << r.horizon.honest_nonpositive << ','
     << r.horizon.malicious_nonnegative << ',' << fmt(r.horizon.mean_honest) << ','
     << fmt(r.horizon.mean_malicious) << ',' << b(c.e1) << ',' << b(c.e2) << ',' << b(c.s1.holds) << ','
     << fmt(c.s1.margin) << ',' << b(c.feasible);
  return os.str();
}

}  // namespace trust::io
