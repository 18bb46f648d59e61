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
#include <optional>
#include <string>
#include <vector>

#include "trust/consensus_stats.hpp"
#include "trust/economics.hpp"

namespace trust::mc {

struct SimConfig {
  stats::VoteConfig vote_cfg;
  econ::EconomicParams econ;
  std::int64_t trials = 100000;
  /// Horizon trials per role; defaults to `trials`.
  std::optional<std::int64_t> horizon_trials;
  std::uint64_t seed = 0;
  std::vector<double> rho_grid;      // adversarial sweep over rho_H
  std::vector<double> epsilon_grid;  // error sweep over epsilon_H
  bool fixed_count_mode = false;
  double eps_target = 1e-4;
  unsigned threads = 0;  // 0: hardware concurrency

  std::int64_t horizon_trial_count() const { return horizon_trials.value_or(trials); }
  /// Throws InvalidArgument unless trials >= 1 and grid values lie in [0, 0.4].
  void validate() const;
};

struct Frequency {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double value = 0.0;
  double std_error = 0.0;  // sqrt(f (1 - f) / n)
};

Frequency make_frequency(std::int64_t hits, std::int64_t trials);

struct TierPass {
  stats::TierParams params;
  Frequency empirical;
  double analytic = 0.0;
};

struct TraceResult {
  Frequency empirical_fail;
  std::optional<double> exact_fail;  // convolution, when S <= kExactTraceMaxSegments
  stats::TraceFailBound bounds;
};

inline constexpr std::size_t kExactTraceMaxSegments = 20;

struct HorizonResult {
  std::int64_t trials = 0;
  bool fixed_count = false;
  double expected_segments = 0.0;
  std::int64_t honest_nonpositive = 0;
  std::int64_t malicious_nonnegative = 0;
  double mean_honest = 0.0;
  double mean_malicious = 0.0;
  double se_honest = 0.0;
  double se_malicious = 0.0;
  double mean_segments = 0.0;
  /// Mean honest payoff per segment and its standard error.
  double honest_per_segment = 0.0;
  double honest_per_segment_se = 0.0;
  /// Segment-weighted mean reputation the honest seat held when voting.
  double mean_honest_reputation = 0.0;
  /// Expected honest payoff per segment at mean_honest_reputation.
  double mu_H_at_mean_reputation = 0.0;
  bool e1_holds = false;
  bool e2_holds = false;
  std::optional<econ::TailBounds> tail;  // absent when E1 fails
  double malicious_mean_bound = 0.0;     // -lambda T delta P
  double sigma_H_sq = 0.0;
};

struct SimReport {
  std::vector<TierPass> segments;
  TraceResult trace;
  HorizonResult horizon;
};

/// Per-tier seat simulation for every distinct TierParams in the config.
std::vector<TierPass> simulate_segments(const SimConfig& cfg);
TraceResult simulate_traces(const SimConfig& cfg);
HorizonResult simulate_horizon(const SimConfig& cfg);
SimReport simulate(const SimConfig& cfg);

/// Frequency of an incorrect majority among k honest seats with error eps.
Frequency simulate_committee_majority(int k, double epsilon, std::int64_t trials, std::uint64_t seed,
                                      unsigned threads = 0);

struct SweepCell {
  double rho = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  SimReport report;
  bool e1 = false;
  bool e2 = false;
  stats::S1Check s1;
  bool feasible = false;
};

/// Seed of one sweep cell, keyed on the base seed and the cell coordinates.
std::uint64_t cell_seed(std::uint64_t seed, double rho, double epsilon);
/// The config a sweep cell runs: the swept tier's rho and epsilon replaced,
/// econ.epsilon_H set to epsilon and the seed replaced by cell_seed.
SimConfig cell_config(const SimConfig& cfg, double rho, double epsilon);

/// Cartesian sweep over rho_grid x epsilon_grid; an absent grid contributes
/// the base value of the swept tier. Throws EmptyGrid when both are empty.
std::vector<SweepCell> sweep(const SimConfig& cfg);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Empirical-versus-analytic checks used by --assert-bounds.
std::vector<Assertion> check_report(const SimReport& r);

}  // namespace trust::mc
