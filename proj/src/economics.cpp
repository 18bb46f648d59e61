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

#include "trust/economics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trust/errors.hpp"

namespace trust::econ {

void EconomicParams::validate() const {
  if (!(R > 0.0)) throw InvalidArgument("R must be positive");
  if (!(P > 0.0)) throw InvalidArgument("P must be positive");
  if (!(p_min > 0.0 && p_min < p_max && p_max <= 1.0)) {
    throw InvalidArgument("need 0 < p_min < p_max <= 1");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  if (!(epsilon_H >= 0.0 && epsilon_H < 1.0)) throw InvalidArgument("epsilon_H must lie in [0,1)");
  if (!(lambda_rate >= 0.0 && horizon_T >= 0.0)) {
    throw InvalidArgument("lambda_rate and horizon_T must be non-negative");
  }
}

double update_reputation(double r, bool correct, double gamma) {
  const double next = (1.0 - gamma) * r + gamma * (correct ? 1.0 : 0.0);
  return std::clamp(next, 0.0, 1.0);
}

double slash_probability(double r, const EconomicParams& ep) {
  const double p = ep.p_min + (ep.p_max - ep.p_min) * (1.0 - std::clamp(r, 0.0, 1.0));
  return std::clamp(p, std::min(ep.p_min, ep.p_max), std::max(ep.p_min, ep.p_max));
}

// (1 - eps) R - eps P p, grouped so that 1 - eps is never formed.
double expected_payoff_honest(double r, const EconomicParams& ep) {
  return ep.R - ep.epsilon_H * (ep.R + ep.P * slash_probability(r, ep));
}

double mu_min(const EconomicParams& ep) {
  return ep.R - ep.epsilon_H * (ep.R + ep.P * ep.p_max);
}

double expected_payoff_malicious(const EconomicParams& ep, double r) {
  return -ep.P * slash_probability(r, ep);
}

double malicious_horizon_loss_bound(const EconomicParams& ep) {
  return -ep.expected_segments() * ep.delta * ep.P;
}

DialCheck check_economic_dials(const EconomicParams& ep) {
  DialCheck d;
  d.e1_threshold = ep.epsilon_H / (1.0 - ep.epsilon_H) * ep.P * ep.p_max;
  d.e1 = ep.R > d.e1_threshold;
  d.alpha = ep.P * ep.p_max / (ep.R + ep.P * ep.p_max);
  d.e2_threshold = ep.delta / (1.0 - d.alpha);
  d.e2 = ep.p_min >= d.e2_threshold;
  d.mu_min = mu_min(ep);
  return d;
}

namespace {

// -n a^2 / (2 s^2 + (2/3) b a)
double bernstein_exponent(double n, double a, double sigma_sq, double b) {
  const double denom = 2.0 * sigma_sq + (2.0 / 3.0) * b * a;
  if (n == 0.0 || a == 0.0) return 0.0;
  return -n * a * a / denom;
}

}  // namespace

TailBounds tail_bounds(const EconomicParams& ep, double sigma_H_sq) {
  const double mu = mu_min(ep);
  if (!(mu > 0.0)) {
    throw E1Violated("mu_min = " + std::to_string(mu) + " is not positive");
  }
  TailBounds t;
  t.range_bound = ep.R;
  const double n = ep.expected_segments();
  t.ln_honest_loss = bernstein_exponent(n, mu, sigma_H_sq, t.range_bound);
  t.ln_malicious_profit = bernstein_exponent(n, ep.delta * ep.P, sigma_H_sq, t.range_bound);
  t.honest_loss = std::exp(t.ln_honest_loss);
  t.malicious_profit = std::exp(t.ln_malicious_profit);
  return t;
}

double payoff_variance(double r, const EconomicParams& ep) {
  const double mu = expected_payoff_honest(r, ep);
  return (1.0 - ep.epsilon_H) * ep.R * ep.R +
         ep.epsilon_H * slash_probability(r, ep) * ep.P * ep.P - mu * mu;
}

VarianceBound payoff_variance_bound(const EconomicParams& ep) {
  VarianceBound v;
  v.crude = (ep.R + ep.P) * (ep.R + ep.P) / 4.0;
  constexpr int kSteps = 1000;
  int best = 0;
  double best_val = payoff_variance(0.0, ep);
  for (int i = 1; i <= kSteps; ++i) {
    const double val = payoff_variance(static_cast<double>(i) / kSteps, ep);
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  v.sup = best_val;
  v.argmax_r = static_cast<double>(best) / kSteps;

  if (best > 0 && best < kSteps) {
    double a = (best - 1.0) / kSteps;
    double c = (best + 1.0) / kSteps;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
      const double x1 = c - inv_phi * (c - a);
      const double x2 = a + inv_phi * (c - a);
      if (payoff_variance(x1, ep) > payoff_variance(x2, ep)) {
        c = x2;
      } else {
        a = x1;
      }
    }
    const double r = 0.5 * (a + c);
    const double val = payoff_variance(r, ep);
    if (val > v.sup) {
      v.sup = val;
      v.argmax_r = r;
    }
  }
  return v;
}

MgfCheck mgf_bound_check(std::span<const double> samples, double theta, double b) {
  if (!(b > 0.0)) throw InvalidArgument("range bound b must be positive");
  if (!(theta > 0.0 && theta < 3.0 / b)) {
    throw ThetaOutOfDomain("theta must lie in (0, 3/b) = (0, " + std::to_string(3.0 / b) + ")");
  }
  if (samples.empty()) throw InvalidArgument("no samples");
  MgfCheck out;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : samples) {
    if (w > b) throw InvalidArgument("sample exceeds range bound b");
    const double e = std::exp(theta * w);
    sum += e;
    sum_sq += e * e;
    out.second_moment += w * w;
  }
  const auto n = static_cast<double>(samples.size());
  out.second_moment /= n;
  out.empirical = sum / n;
  const double var = std::max(0.0, sum_sq / n - out.empirical * out.empirical);
  out.std_error = std::sqrt(var / n);
  out.bound = std::exp(theta * theta * out.second_moment / (2.0 * (1.0 - theta * b / 3.0)));
  out.holds = out.empirical <= out.bound + 3.0 * out.std_error;
  return out;
}

}  // namespace trust::econ
