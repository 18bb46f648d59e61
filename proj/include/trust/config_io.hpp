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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trust/consensus_stats.hpp"
#include "trust/economics.hpp"
#include "trust/montecarlo.hpp"

namespace trust::io {

/// Analysis config shared by the bounds, simulate and sweep commands:
///
///   { "tau": 0.66, "beta": 0.55,
///     "segments": [ {"tier": "human", "count": 20}, ... ],
///     "economics": { "R": 6, "P": 8, ... },
///     "eps_target": 1e-4,
///     "committee_bound": { "k": [7, 21], "epsilon": 0.3 },
///     "simulation": { "trials": 100000, "seed": 7, ... } }
///
/// Segment entries default k, epsilon and rho from the tier table; unknown
/// keys are rejected. Errors are ConfigParseError naming the JSON path.
struct AnalysisConfig {
  stats::VoteConfig vote;
  econ::EconomicParams econ;
  double eps_target = 1e-4;
  std::vector<int> committee_ks;
  std::optional<double> committee_epsilon;  // defaults to econ.epsilon_H
  mc::SimConfig sim;  // vote_cfg and econ mirror the fields above
};

AnalysisConfig analysis_config_from_json(const nlohmann::json& doc);
econ::EconomicParams economic_params_from_json(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json to_json(const stats::TierParams& t);
nlohmann::json to_json(const stats::VoteConfig& v);
nlohmann::json to_json(const econ::EconomicParams& ep);
nlohmann::json to_json(const mc::Frequency& f);
nlohmann::json to_json(const mc::SimReport& r);
nlohmann::json to_json(const mc::SweepCell& c);
nlohmann::json to_json(const mc::Assertion& a);

/// Natural log plus the decimal value when it is representable (ln > -700).
nlohmann::json log_probability(double ln_p);

/// Analytic report: per-tier pass probabilities, trace moments and bounds,
/// S1/E1/E2 checks, mu_min, sigma_H^2 and horizon tail bounds.
nlohmann::json bounds_report(const AnalysisConfig& cfg);

std::string sweep_csv_header();
std::string sweep_csv_row(const mc::SweepCell& c);

}  // namespace trust::io
