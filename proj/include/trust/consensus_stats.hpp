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

#include <vector>

#include "trust/graph.hpp"

namespace trust::stats {

/// Committee parameters for one segment: seats, honest error rate,
/// adversarial fraction and trace weight.
struct TierParams {
  graph::Tier tier = graph::Tier::kHuman;
  int k = 1;
  double epsilon = 0.0;
  double rho = 0.0;
  double w = 1.0;
};

/// Table defaults: computational (eps 0, rho 0), LLM (eps 0.05, rho 0),
/// human (eps 0.30, rho 0.10). Seat counts are 1, 3 and 5.
TierParams default_tier(graph::Tier tier);

inline constexpr double kDefaultTau = 0.66;

struct VoteConfig {
  double tau = kDefaultTau;
  double beta = 0.5;
  std::vector<TierParams> segments;

  double total_weight() const;
  double threshold_weight() const { return beta * total_weight(); }  // W_beta
};

/// ceil(tau * k), where an integral product is not bumped by rounding noise.
int quorum(int k, double tau);

/// Exact probability that at least quorum(k, tau) of k seats vote correctly
/// when each seat is malicious (always wrong) with probability rho and an
/// honest seat errs with probability epsilon. Log-space for k > 30.
double segment_pass_prob(const TierParams& t, double tau);

struct TraceMoments {
  double mu = 0.0;            // sum w p
  double sigma_sq = 0.0;      // sum w^2 p (1 - p)
  double sigma_max_sq = 0.0;  // sum w^2
};

TraceMoments trace_moments(const VoteConfig& cfg);

struct TraceFailBound {
  double hoeffding = 1.0;
  double chernoff = 1.0;
  double min = 1.0;
  double ln_hoeffding = 0.0;
  double ln_chernoff = 0.0;
  double chernoff_lambda = 0.0;  // minimiser; 0 when the bound is vacuous
};

/// Upper bounds on P[W < W_beta]. Both are 1 when mu <= W_beta.
TraceFailBound trace_fail_bound(const VoteConfig& cfg);

/// Largest lambda searched by the Chernoff minimiser: 50 / max w.
double chernoff_lambda_max(const VoteConfig& cfg);

/// ln of the Chernoff product at a given lambda.
double chernoff_log_bound(const VoteConfig& cfg, double lambda);

/// True when a weighted pass total meets the trace quorum. Shared by the
/// exact and simulated routes so ties resolve identically.
bool trace_passes(double weighted_total, double threshold);

/// P[W < W_beta] by convolution of the independent segment Bernoullis.
double exact_trace_fail_prob(const VoteConfig& cfg);

/// exp(-2 k (1/2 - eps)^2). Throws EpsilonTooLarge when eps >= 0.5.
double committee_error_bound(int k, double epsilon);

struct S1Check {
  bool holds = false;
  double lhs = 0.0;  // mu - W_beta
  double rhs = 0.0;  // sqrt(sigma^2 / 2 * ln(lambda T / eps_target))
  double margin = 0.0;
};

S1Check check_s1(const VoteConfig& cfg, double lambda_rate, double horizon, double eps_target);

}  // namespace trust::stats
