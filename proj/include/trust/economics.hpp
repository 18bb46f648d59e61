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

#include <span>

namespace trust::econ {

/// Reward/penalty dial. Amounts are token units; lambda_rate is segments per
/// unit time over a horizon of horizon_T units.
struct EconomicParams {
  double R = 6.0;
  double P = 8.0;
  double p_min = 0.35;
  double p_max = 0.5;
  double gamma = 0.1;
  double delta = 0.2;
  double lambda_rate = 60.0;
  double horizon_T = 24.0;
  double epsilon_H = 0.30;

  double expected_segments() const { return lambda_rate * horizon_T; }
  /// Throws InvalidArgument unless 0 < p_min < p_max <= 1, R > 0, P > 0,
  /// gamma in (0,1], delta in (0,1), epsilon_H in [0,1).
  void validate() const;
};

/// Reputation assigned to a seat with no history.
inline constexpr double kInitialReputation = 0.5;

struct SeatState {
  double reputation = kInitialReputation;
  double stake = 0.0;
  double cumulative_payoff = 0.0;
  bool is_malicious = false;
};

double update_reputation(double r, bool correct, double gamma);
double slash_probability(double r, const EconomicParams& ep);
double expected_payoff_honest(double r, const EconomicParams& ep);
/// Honest expected payoff at the worst reputation (r = 0).
double mu_min(const EconomicParams& ep);
/// A malicious seat always votes against consensus: -P * p_slash(r).
double expected_payoff_malicious(const EconomicParams& ep, double r = 0.0);
/// Upper bound on a malicious seat's expected horizon payoff: -lambda T delta P.
double malicious_horizon_loss_bound(const EconomicParams& ep);

struct DialCheck {
  bool e1 = false;
  bool e2 = false;
  double e1_threshold = 0.0;  // eps/(1-eps) * P * p_max
  double alpha = 0.0;         // P p_max / (R + P p_max)
  double e2_threshold = 0.0;  // delta / (1 - alpha)
  double mu_min = 0.0;
};

DialCheck check_economic_dials(const EconomicParams& ep);

struct TailBounds {
  double ln_honest_loss = 0.0;
  double ln_malicious_profit = 0.0;
  double honest_loss = 1.0;
  double malicious_profit = 1.0;
  double range_bound = 0.0;  // b = R
};

/// Bernstein-type horizon bounds on P[U_hon <= 0] and P[U_mal >= 0].
/// Throws E1Violated when mu_min <= 0.
TailBounds tail_bounds(const EconomicParams& ep, double sigma_H_sq);

/// Per-segment payoff variance of an honest seat at reputation r.
double payoff_variance(double r, const EconomicParams& ep);

struct VarianceBound {
  double sup = 0.0;
  double argmax_r = 0.0;
  double crude = 0.0;  // (R + P)^2 / 4
};

/// Supremum of payoff_variance over r in [0,1]: 1e-3 grid, both endpoints,
/// then a golden-section polish around the best grid point.
VarianceBound payoff_variance_bound(const EconomicParams& ep);

struct MgfCheck {
  bool holds = false;
  double empirical = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  double second_moment = 0.0;
};

/// Empirical E[exp(theta W)] against exp(theta^2 s^2 / (2 (1 - theta b / 3)))
/// with a 3-standard-error allowance. Throws ThetaOutOfDomain unless
/// 0 < theta < 3/b, InvalidArgument if a sample exceeds b.
MgfCheck mgf_bound_check(std::span<const double> samples, double theta, double b);

}  // namespace trust::econ
